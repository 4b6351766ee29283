//! The experiment subcommands. Each one turns a config into artifacts;
//! nothing here touches the filesystem except fixture loading.

mod energy;
mod infer;
mod latency;
mod scalability;
mod sweep;

pub use energy::{energy_breakdown, energy_table};
pub use infer::{infer_compare, infer_reports, infer_table};
pub use latency::{latency, latency_table};
pub use scalability::{scalability, scalability_rows, scalability_table, ScalabilityRow};
pub use sweep::{multiply_sweep, sweep_rows, sweep_table, SweepRow};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::Artifact;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    MultiplySweep,
    Scalability,
    EnergyBreakdown,
    InferCompare,
    Latency,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::MultiplySweep,
        Command::Scalability,
        Command::EnergyBreakdown,
        Command::InferCompare,
        Command::Latency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::MultiplySweep => "multiply-sweep",
            Command::Scalability => "scalability",
            Command::EnergyBreakdown => "energy-breakdown",
            Command::InferCompare => "infer-compare",
            Command::Latency => "latency",
        }
    }

    pub fn run(self, cfg: &ExperimentConfig) -> CliResult<Vec<Artifact>> {
        match self {
            Command::MultiplySweep => multiply_sweep(cfg),
            Command::Scalability => scalability(cfg),
            Command::EnergyBreakdown => energy_breakdown(cfg),
            Command::InferCompare => infer_compare(cfg),
            Command::Latency => latency(cfg),
        }
    }
}
