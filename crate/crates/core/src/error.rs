use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "infeasible window: past {past} + future {future} days exceeds the dataset span of \
         {span} days (largest feasible equal window is {max_equal_window} days)"
    )]
    InfeasibleWindow {
        past: f64,
        future: f64,
        span: f64,
        max_equal_window: f64,
    },

    #[error(
        "pagerank did not converge after {iterations} iterations (last L1 residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidConfig(message.into())
    }
}
