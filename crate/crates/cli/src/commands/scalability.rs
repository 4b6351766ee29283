use astra_core::photonic::{max_lanes_per_wavelength, required_laser_power};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{num, Artifact, Table};
use crate::svg::{line_chart, Level, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalabilityRow {
    pub lanes: u64,
    pub required_laser_dbm: f64,
    /// The configured laser power supports this many lanes.
    pub feasible: bool,
}

pub fn scalability_rows(cfg: &ExperimentConfig) -> Vec<ScalabilityRow> {
    let p = &cfg.photonic;
    let max = max_lanes_per_wavelength(p, p.laser_power_dbm);
    cfg.scalability_lanes
        .iter()
        .map(|&lanes| ScalabilityRow {
            lanes,
            required_laser_dbm: required_laser_power(lanes, p),
            feasible: lanes <= max,
        })
        .collect()
}

pub fn scalability_table(rows: &[ScalabilityRow]) -> Table {
    let mut t = Table::new("scalability", &["lanes", "required_laser_dbm", "feasible"]);
    for r in rows {
        t.push(vec![r.lanes.to_string(), num(r.required_laser_dbm), r.feasible.to_string()]);
    }
    t
}

pub fn scalability(cfg: &ExperimentConfig) -> CliResult<Vec<Artifact>> {
    let rows = scalability_rows(cfg);
    let series = [Series {
        label: "required".into(),
        points: rows.iter().map(|r| (r.lanes as f64, r.required_laser_dbm)).collect(),
    }];
    let level = [Level {
        label: format!("laser {} dBm", cfg.photonic.laser_power_dbm),
        y: cfg.photonic.laser_power_dbm,
    }];
    let svg = line_chart(
        "Laser power per wavelength",
        "OAG lanes",
        "required laser power (dBm)",
        &series,
        &level,
        true,
    );
    Ok(vec![
        Artifact::csv("scalability.csv", &scalability_table(&rows))?,
        Artifact::text("scalability.svg", svg),
    ])
}
