use astra_core::photonic::{transformer_workload, workload_energy, EnergyReport};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{num, Artifact, Table};
use crate::svg::stacked_bar;

/// One row per component in declaration order, then a `total` row.
pub fn energy_table(report: &EnergyReport) -> Table {
    let mut t = Table::new("energy-breakdown", &["component", "joules", "percent"]);
    for (c, j) in report.components() {
        t.push(vec![c.to_string(), num(j), num(report.percent(c))]);
    }
    let total = if report.total() > 0.0 { 100.0 } else { 0.0 };
    t.push(vec!["total".into(), num(report.total()), num(total)]);
    t
}

pub fn energy_breakdown(cfg: &ExperimentConfig) -> CliResult<Vec<Artifact>> {
    let workload = transformer_workload(&cfg.workload)?;
    let report = workload_energy(&workload, &cfg.arch, &cfg.photonic);
    let segments: Vec<(String, f64)> = report.components().map(|(c, j)| (c.to_string(), j)).collect();
    let svg = stacked_bar("Energy per inference", "share of total energy", &segments);
    Ok(vec![
        Artifact::csv("energy_breakdown.csv", &energy_table(&report))?,
        Artifact::text("energy_breakdown.svg", svg),
    ])
}
