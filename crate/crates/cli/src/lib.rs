//! Config-driven experiment runner for `dissem-core`.

pub mod catalog;
pub mod config;
pub mod experiments;
pub mod manifest;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use catalog::{Experiment, ExperimentInfo};
pub use config::{ExperimentConfig, Overrides};
pub use manifest::RunManifest;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) | CliError::Output(_) => 4,
        }
    }
}

impl From<dissem_core::Error> for CliError {
    fn from(e: dissem_core::Error) -> Self {
        use dissem_core::Error as E;
        match e {
            E::BlowUp { .. } | E::InsufficientDecay { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Exit code when the run completed but a built-in tolerance failed.
pub const EXIT_TOLERANCE: u8 = 1;

/// Parse, run and write outputs. Returns the manifest that was written.
pub fn run_file(path: &Path, overrides: &Overrides) -> CliResult<RunManifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let config = ExperimentConfig::parse(&text)?.with_overrides(overrides);
    run(&config)
}

pub fn run(config: &ExperimentConfig) -> CliResult<RunManifest> {
    let params = config.resolve()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    let start = std::time::Instant::now();
    let outcome = pool.install(|| experiments::execute(&params, config.seed))?;
    let wall = start.elapsed().as_secs_f64();

    let dir = PathBuf::from(&config.output_dir);
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for (name, table) in &outcome.tables {
        let file = format!("{name}.dat");
        std::fs::write(dir.join(&file), table.to_text())
            .map_err(|e| CliError::Output(format!("{file}: {e}")))?;
        files.push(file);
    }
    let manifest = RunManifest::new(config, &params, outcome, files, wall)?;
    std::fs::write(dir.join("manifest.json"), manifest.to_json())
        .map_err(|e| CliError::Output(format!("manifest.json: {e}")))?;
    Ok(manifest)
}
