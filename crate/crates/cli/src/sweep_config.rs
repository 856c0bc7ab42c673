//! TOML description of a sweep. Every key is optional except `input` and
//! `output`; omitted keys take the defaults below, and the resolved values
//! are recorded in the run manifest.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use trendrank::experiment::{ExperimentConfig, ParameterGrid, VariantKind};
use trendrank::metrics::TauVariant;
use trendrank::{Error, PageRankConfig};

use crate::failure::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepFile {
    /// Edge file.
    pub input: PathBuf,
    /// Sweep CSV; the manifest goes next to it as `<output>.manifest.json`.
    pub output: PathBuf,
    pub num_samples: usize,
    pub seed: u64,
    /// Window lengths in days, each used for both past and future.
    pub windows: Vec<f64>,
    pub top_n: usize,
    /// Any of m1, m2, m3, pbp, pagerank, recent.
    pub predictors: Vec<String>,
    pub gamma: Vec<f64>,
    pub alpha: Vec<f64>,
    pub delta: Vec<f64>,
    pub lambda: Vec<f64>,
    pub pagerank_tolerance: f64,
    pub max_iterations: usize,
    /// `gamma` or `b`.
    pub tau: String,
}

impl Default for SweepFile {
    fn default() -> Self {
        let experiment = ExperimentConfig::default();
        let grid = ParameterGrid::default();
        let names = |kind: &VariantKind| match kind {
            VariantKind::M1 => "m1",
            VariantKind::M2 => "m2",
            VariantKind::M3 => "m3",
            VariantKind::Pbp => "pbp",
            VariantKind::PageRank => "pagerank",
            VariantKind::Recent => "recent",
        };
        Self {
            input: PathBuf::new(),
            output: PathBuf::new(),
            num_samples: experiment.num_samples,
            seed: experiment.seed,
            windows: experiment.windows,
            top_n: experiment.top_n,
            predictors: grid.variants.iter().map(|k| names(k).to_owned()).collect(),
            gamma: grid.gammas,
            alpha: grid.alphas,
            delta: grid.deltas,
            lambda: grid.lambdas,
            pagerank_tolerance: PageRankConfig::default().tolerance,
            max_iterations: PageRankConfig::default().max_iterations,
            tau: experiment.tau.as_str().to_owned(),
        }
    }
}

impl SweepFile {
    /// Reads `path` and resolves relative `input`/`output` against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let mut file: SweepFile =
            toml::from_str(&text).map_err(|e| Failure::config(path, e.message()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut file.input, &mut file.output] {
            if !p.as_os_str().is_empty() && p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(file)
    }

    pub fn experiment(&self) -> Result<ExperimentConfig, Error> {
        if self.input.as_os_str().is_empty() {
            return Err(Error::InvalidConfig("sweep config needs `input`".into()));
        }
        if self.output.as_os_str().is_empty() {
            return Err(Error::InvalidConfig("sweep config needs `output`".into()));
        }
        let grid = ParameterGrid {
            variants: self
                .predictors
                .iter()
                .map(|p| p.parse())
                .collect::<Result<_, _>>()?,
            gammas: self.gamma.clone(),
            alphas: self.alpha.clone(),
            deltas: self.delta.clone(),
            lambdas: self.lambda.clone(),
            tolerance: self.pagerank_tolerance,
            max_iterations: self.max_iterations,
        };
        let config = ExperimentConfig {
            num_samples: self.num_samples,
            seed: self.seed,
            windows: self.windows.clone(),
            top_n: self.top_n,
            predictors: grid.expand(),
            tau: self.tau.parse::<TauVariant>()?,
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_windows_and_defaults() {
        let file: SweepFile =
            toml::from_str("input = \"e.tsv\"\noutput = \"o.csv\"\nwindows = [30, 60.5]\n")
                .unwrap();
        assert_eq!(file.windows, vec![30.0, 60.5]);
        assert_eq!(file.num_samples, 10);
        assert_eq!(file.top_n, 100);
        let config = file.experiment().unwrap();
        assert_eq!(config.predictors.len(), 5);
    }

    #[test]
    fn example_config_spells_out_the_defaults() {
        let example: SweepFile = toml::from_str(include_str!("../sweep.example.toml")).unwrap();
        let defaults = SweepFile {
            input: "edges.tsv".into(),
            output: "sweep.csv".into(),
            ..SweepFile::default()
        };
        assert_eq!(example, defaults);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<SweepFile>("input = \"e\"\nsamples = 3\n").is_err());
    }

    #[test]
    fn bad_predictor_is_invalid() {
        let file: SweepFile =
            toml::from_str("input = \"e\"\noutput = \"o\"\npredictors = [\"m9\"]\n").unwrap();
        assert!(matches!(file.experiment(), Err(Error::InvalidConfig(_))));
    }
}
