use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::experiments::{Check, Outcome, Params};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub experiment: String,
    pub seed: u64,
    pub output_dir: String,
    pub threads: usize,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    /// SHA-256 of the experiment name, seed and resolved parameters.
    pub config_hash: String,
    pub config: ResolvedConfig,
    pub wall_time_s: f64,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn new(
        config: &ExperimentConfig,
        params: &Params,
        outcome: Outcome,
        files: Vec<String>,
        wall_time_s: f64,
    ) -> CliResult<Self> {
        let params = serde_json::to_value(params)
            .map_err(|e| CliError::Output(format!("serializing parameters: {e}")))?;
        let resolved = ResolvedConfig {
            experiment: config.experiment.info().name.to_string(),
            seed: config.seed,
            output_dir: config.output_dir.clone(),
            threads: config.threads,
            params,
        };
        let pass = outcome.checks.iter().all(|c| c.pass);
        Ok(Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config_hash: config_hash(&resolved),
            config: resolved,
            wall_time_s,
            metrics: outcome.metrics,
            checks: outcome.checks,
            pass,
            files,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Output directory and thread count do not change results and are left out.
fn config_hash(c: &ResolvedConfig) -> String {
    let key = serde_json::json!({
        "experiment": c.experiment,
        "seed": c.seed,
        "params": c.params,
    });
    let digest = Sha256::digest(key.to_string().as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}
