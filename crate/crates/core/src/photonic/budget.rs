use super::PhotonicParams;

/// Slack for comparing dBm budgets that were computed by the same formula.
const BUDGET_EPS_DB: f64 = 1e-9;

/// Optical power needed at each lane after every loss: the OAG requirement
/// or the detector sensitivity, whichever is higher.
pub fn oag_requirement_dbm(p: &PhotonicParams) -> f64 {
    let oag_dbm = 10.0 * (p.oag_optical_power_uw * 1e-3).log10();
    oag_dbm.max(p.detector_sensitivity_dbm)
}

/// Ideal `1/L` power division plus splitter excess for a binary tree of
/// `ceil(log2 L)` stages.
pub fn split_loss_db(lanes: u64, p: &PhotonicParams) -> f64 {
    assert!(lanes >= 1);
    let stages = u64::BITS - (lanes - 1).leading_zeros();
    f64::from(stages) * p.splitter_excess_loss_db + 10.0 * (lanes as f64).log10()
}

/// Minimal per-wavelength laser power that feeds `lanes` OAGs.
pub fn required_laser_power(lanes: u64, p: &PhotonicParams) -> f64 {
    oag_requirement_dbm(p) + p.propagation_loss_db + p.insertion_loss_db_per_oag + split_loss_db(lanes, p)
}

/// Largest lane count the laser can feed; 0 when even a single lane fails.
pub fn max_lanes_per_wavelength(p: &PhotonicParams, laser_power_dbm: f64) -> u64 {
    assert!(laser_power_dbm.is_finite(), "laser power must be finite");
    let fits = |l: u64| required_laser_power(l, p) <= laser_power_dbm + BUDGET_EPS_DB;
    if !fits(1) {
        return 0;
    }
    // The ideal split alone bounds the answer from above.
    let headroom = laser_power_dbm + BUDGET_EPS_DB - required_laser_power(1, p);
    let cap = 10f64.powf(headroom / 10.0).floor().min((1u64 << 53) as f64) as u64;
    let (mut lo, mut hi) = (1u64, cap.max(1) + 1);
    // fits(lo) holds; search the first failing count in (lo, hi].
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
