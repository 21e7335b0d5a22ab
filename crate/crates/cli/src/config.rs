//! Manifest files and their precedence below command-line flags.

use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::args::{EngineArg, StrategyArg};
use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub theta_min: Option<f64>,
    pub theta_max: Option<f64>,
    pub steps: Option<usize>,
    pub n_t1: Option<usize>,
    pub n_t2: Option<usize>,
    pub n_ds: Option<usize>,
    pub t1: Option<Vec<f64>>,
    pub t2: Option<Vec<f64>>,
    pub ds: Option<Vec<f64>>,
    pub engine: Option<EngineArg>,
    pub grid_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditFile {
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub trials: Option<usize>,
    pub min_dim: Option<usize>,
    pub max_dim: Option<usize>,
    pub theta_min: Option<f64>,
    pub theta_max: Option<f64>,
    pub tolerance: Option<f64>,
    pub product_every: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McFile {
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub theta_over_sigma: Option<f64>,
    pub n: Option<usize>,
    pub reps: Option<usize>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub ds: Option<f64>,
    pub strategies: Option<Vec<StrategyArg>>,
    pub search_min: Option<f64>,
    pub search_max: Option<f64>,
    pub table_points: Option<usize>,
}

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Resolves one setting: an explicit flag, else the file, else the flag default.
pub struct Layer<'a> {
    matches: &'a ArgMatches,
}

impl<'a> Layer<'a> {
    pub fn new(matches: &'a ArgMatches) -> Self {
        Self { matches }
    }

    fn explicit(&self, id: &str) -> bool {
        matches!(
            self.matches.value_source(id),
            Some(ValueSource::CommandLine)
        )
    }

    pub fn pick<T>(&self, id: &str, flag: T, file: Option<T>) -> T {
        if self.explicit(id) {
            flag
        } else {
            file.unwrap_or(flag)
        }
    }

    pub fn pick_opt<T>(&self, id: &str, flag: Option<T>, file: Option<T>) -> Option<T> {
        if self.explicit(id) {
            flag
        } else {
            file.or(flag)
        }
    }
}
