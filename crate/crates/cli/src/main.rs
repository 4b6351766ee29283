use std::path::PathBuf;
use std::process::ExitCode;

use astra_sim::{run, CliError, Command, Invocation};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "astra-sim", version, about = "Stochastic-photonic accelerator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single-multiply error versus stream length and generator.
    MultiplySweep(Args),
    /// Required laser power over a lane-count sweep.
    Scalability(Args),
    /// Per-component energy of the configured workload.
    EnergyBreakdown(Args),
    /// Accuracy of quantized and stochastic inference against exact.
    InferCompare(Args),
    /// Per-GEMM latency tables.
    Latency(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Override any config key, e.g. `--set sc.stream_length=64`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

/// `ASTRA_SIM_THREADS` caps the worker pool.
fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ASTRA_SIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("ASTRA_SIM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Run(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::MultiplySweep(a) => (Command::MultiplySweep, a),
        Cmd::Scalability(a) => (Command::Scalability, a),
        Cmd::EnergyBreakdown(a) => (Command::EnergyBreakdown, a),
        Cmd::InferCompare(a) => (Command::InferCompare, a),
        Cmd::Latency(a) => (Command::Latency, a),
    };
    let inv = Invocation {
        config: args.config,
        out: args.out,
        seed: args.seed,
        overrides: args.set,
    };
    match init_threads().and_then(|()| run(command, &inv)) {
        Ok(dir) => {
            eprintln!("{}: wrote {}", command.name(), dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("astra-sim {}: {e}", command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
