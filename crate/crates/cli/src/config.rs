//! TOML run configuration.
//!
//! ```toml
//! experiment = "BathDecay"
//! seed = 7
//! output_dir = "out/bath"
//! threads = 1          # 0 = one per core
//!
//! [params]
//! eta = 0.05
//! ```
//!
//! Unknown keys at either level are rejected. Missing parameters take the
//! defaults of the experiment, and the resolved set is echoed in the manifest.

use serde::{Deserialize, Serialize};

use crate::catalog::Experiment;
use crate::experiments::Params;
use crate::{CliError, CliResult};

fn default_output_dir() -> String {
    "output".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub params: toml::Table,
}

/// Command-line values that replace config entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub output_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            seed: 0,
            output_dir: default_output_dir(),
            threads: 0,
            params: toml::Table::new(),
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn with_overrides(mut self, o: &Overrides) -> Self {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(threads) = o.threads {
            self.threads = threads;
        }
        if let Some(dir) = &o.output_dir {
            self.output_dir = dir.clone();
        }
        self
    }

    /// Typed parameters with defaults filled in.
    pub fn resolve(&self) -> CliResult<Params> {
        Params::from_table(self.experiment, self.params.clone())
    }
}
