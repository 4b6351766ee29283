//! Experiment harness for the stochastic-photonic accelerator simulator.
//!
//! Every subcommand maps an [`config::ExperimentConfig`] to a list of
//! [`output::Artifact`]s (versioned CSV tables and SVG plots); `main` writes
//! them in order.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

use std::path::{Path, PathBuf};

use astra_core::kv::FlatConfig;

pub use commands::Command;
pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};

/// Command-line inputs shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub overrides: Vec<String>,
}

impl Invocation {
    /// Reads the config file, applies `--set` overrides and then `--seed`.
    pub fn load(&self) -> CliResult<ExperimentConfig> {
        let mut kv = FlatConfig::from_path(&self.config)?;
        for o in &self.overrides {
            kv.apply_override(o)?;
        }
        if let Some(seed) = self.seed {
            let seed = i64::try_from(seed)
                .map_err(|_| CliError::Config(format!("seed {seed} exceeds the config integer range")))?;
            kv.set("seed", seed);
        }
        let base = self.config.parent().unwrap_or(Path::new("."));
        let mut cfg = ExperimentConfig::from_kv(&kv, base)?;
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        Ok(cfg)
    }
}

/// Loads the config, runs `command` and writes its artifacts.
pub fn run(command: Command, inv: &Invocation) -> CliResult<PathBuf> {
    let cfg = inv.load()?;
    let artifacts = command.run(&cfg)?;
    output::write_all(&cfg.out_dir, &artifacts)?;
    Ok(cfg.out_dir)
}
