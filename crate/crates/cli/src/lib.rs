//! Experiment runner behind the `korteweg-lab` binary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod presets;

use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::CliError;
pub use output::Manifest;

/// Loads `config`, applies the overrides and runs it. Returns the manifest
/// and the directory it was written to.
pub fn run_config(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<(Manifest, PathBuf), CliError> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if out.is_some() {
        cfg.out = out;
    }
    cfg.validate()?;
    let dir = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs").join(cfg.experiment.name()));
    let run_dir = output::RunDir::create(&dir)?;
    let manifest = experiments::execute(&cfg, run_dir)?;
    Ok((manifest, dir))
}
