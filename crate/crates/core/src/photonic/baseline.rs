use super::GemmWorkload;
use crate::error::{Error, Result};

/// A what-if baseline characterized only by MAC energy and MAC throughput.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineParams {
    pub name: String,
    pub energy_per_mac_pj: f64,
    pub macs_per_second: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineCost {
    pub seconds: f64,
    pub joules: f64,
}

pub fn baseline_cost(workload: &GemmWorkload, baseline: &BaselineParams) -> Result<BaselineCost> {
    let ok = |v: f64| v.is_finite() && v > 0.0;
    if !ok(baseline.energy_per_mac_pj) || !ok(baseline.macs_per_second) {
        return Err(Error::InvalidConfig(format!(
            "baseline {} needs positive energy_per_mac_pj and macs_per_second",
            baseline.name
        )));
    }
    let macs = workload.total_macs() as f64;
    Ok(BaselineCost {
        seconds: macs / baseline.macs_per_second,
        joules: macs * baseline.energy_per_mac_pj * 1e-12,
    })
}
