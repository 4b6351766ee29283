use astra_core::sc::{
    binary_to_stochastic, mix64, ossm_multiply, quantize, stochastic_to_value, ChannelId, Generator,
    OperandRole, ScConfig,
};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{num, Artifact, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value_x: f64,
    pub value_w: f64,
    pub n: usize,
    pub generator: Generator,
    /// Mean of `decoded - x * w` over the trials.
    pub mean_error: f64,
    pub mse: f64,
}

/// Trial `t` runs with master seed `mix64(seed ^ mix64(t))`; the operands
/// sit on channels `(Lhs, 0)` and `(Rhs, 0)`.
fn sweep_row(x: f64, w: f64, n: usize, generator: Generator, cfg: &ExperimentConfig) -> CliResult<SweepRow> {
    let base = cfg.sc();
    let trials = cfg.multiply_sweep.trials;
    let xq = quantize(x, base.magnitude_bits, 1.0)?;
    let wq = quantize(w, base.magnitude_bits, 1.0)?;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for t in 0..trials as u64 {
        let sc = ScConfig {
            stream_length: n,
            generator,
            master_seed: mix64(cfg.seed ^ mix64(t)),
            ..base
        };
        let xs = binary_to_stochastic(&xq, &sc, &sc.channel(ChannelId::derive(OperandRole::Lhs, 0)))?;
        let ws = binary_to_stochastic(&wq, &sc, &sc.channel(ChannelId::derive(OperandRole::Rhs, 0)))?;
        let err = stochastic_to_value(&ossm_multiply(&xs, &ws)?) - x * w;
        sum += err;
        sum_sq += err * err;
    }
    Ok(SweepRow {
        value_x: x,
        value_w: w,
        n,
        generator,
        mean_error: sum / trials as f64,
        mse: sum_sq / trials as f64,
    })
}

/// Rows ordered by pair, then generator, then stream length.
pub fn sweep_rows(cfg: &ExperimentConfig) -> CliResult<Vec<SweepRow>> {
    let s = &cfg.multiply_sweep;
    let jobs: Vec<(f64, f64, Generator, usize)> = s
        .pairs
        .iter()
        .flat_map(|&(x, w)| {
            s.generators
                .iter()
                .flat_map(move |&g| s.stream_lengths.iter().map(move |&n| (x, w, g, n)))
        })
        .collect();
    jobs.into_par_iter()
        .map(|(x, w, g, n)| sweep_row(x, w, n, g, cfg))
        .collect()
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(
        "multiply-sweep",
        &["value_x", "value_w", "n", "generator", "mean_error", "mse"],
    );
    for r in rows {
        t.push(vec![
            num(r.value_x),
            num(r.value_w),
            r.n.to_string(),
            r.generator.to_string(),
            num(r.mean_error),
            num(r.mse),
        ]);
    }
    t
}

pub fn multiply_sweep(cfg: &ExperimentConfig) -> CliResult<Vec<Artifact>> {
    let rows = sweep_rows(cfg)?;
    Ok(vec![Artifact::csv("multiply_sweep.csv", &sweep_table(&rows))?])
}
