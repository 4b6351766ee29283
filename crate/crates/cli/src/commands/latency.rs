use astra_core::photonic::{transformer_workload, workload_latency, GemmWorkload};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{num, Artifact, Table};

/// Per workload: one `<workload>/<gemm>` row per GEMM and a
/// `<workload>/total` row. Explicit `latency.gemms` form the `gemms` group.
pub fn latency_table(cfg: &ExperimentConfig) -> CliResult<Table> {
    let mut groups = Vec::new();
    for (name, spec) in &cfg.latency_workloads {
        groups.push((name.clone(), transformer_workload(spec)?));
    }
    if !cfg.latency_gemms.is_empty() {
        let w = GemmWorkload {
            gemms: cfg.latency_gemms.clone(),
        };
        w.validate()?;
        groups.push(("gemms".into(), w));
    }
    let mut t = Table::new("latency", &["gemm", "passes", "seconds"]);
    for (group, w) in &groups {
        let report = workload_latency(w, &cfg.arch, &cfg.photonic);
        for g in &report.per_gemm {
            t.push(vec![format!("{group}/{}", g.name), g.passes.to_string(), num(g.seconds)]);
        }
        let passes: u64 = report.per_gemm.iter().map(|g| g.passes).sum();
        t.push(vec![format!("{group}/total"), passes.to_string(), num(report.total_seconds)]);
    }
    Ok(t)
}

pub fn latency(cfg: &ExperimentConfig) -> CliResult<Vec<Artifact>> {
    Ok(vec![Artifact::csv("latency.csv", &latency_table(cfg)?)?])
}
