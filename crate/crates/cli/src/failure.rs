use std::fmt;
use std::path::Path;

use trendrank::Error;

/// A command failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: &'static str,
    pub exit: i32,
    pub message: String,
}

impl Failure {
    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self {
            code: "io",
            exit: 3,
            message: format!("{}: {err}", path.display()),
        }
    }

    pub fn config(path: &Path, err: impl fmt::Display) -> Self {
        Self {
            code: "config",
            exit: 4,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let (code, exit) = match &err {
            Error::Io { .. } => ("io", 3),
            Error::Parse { .. } => ("parse", 4),
            Error::InfeasibleWindow { .. } => ("infeasible_window", 5),
            Error::EmptyDataset(_) => ("empty_dataset", 6),
            Error::InvalidConfig(_) => ("invalid_config", 7),
            Error::NotConverged { .. } => ("not_converged", 8),
        };
        Self {
            code,
            exit,
            message: err.to_string(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_line = self.message.replace(['\n', '\r'], " ");
        write!(
            f,
            "error: code={} exit={} msg={one_line}",
            self.code, self.exit
        )
    }
}
