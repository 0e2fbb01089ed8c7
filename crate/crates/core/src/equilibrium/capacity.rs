use serde::Serialize;

use super::interior_points;
use super::measure::EquilibriumMeasure;
use crate::error::{Error, Result};

const CONSTANCY_POINTS: usize = 25;
const CONSTANCY_TOL: f64 = 1e-6;

/// Robin constant, minimal energy and capacity of a weighted equilibrium problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityReport {
    /// Value of `U - log w` on the support.
    #[serde(rename = "F_w")]
    pub robin_constant: f64,
    /// Minimal weighted energy.
    #[serde(rename = "V_w")]
    pub energy: f64,
    /// `exp(-V_w)`.
    #[serde(rename = "c_w")]
    pub capacity: f64,
    /// Largest deviation of `U - log w` from `F_w` over sample points of the support.
    pub equilibrium_constancy_residual: f64,
}

/// Evaluates `F_w` at the midpoint of the widest interval, then
/// `V_w = F_w - int log w d mu` and `c_w = exp(-V_w)`.
pub fn capacity(m: &EquilibriumMeasure) -> Result<CapacityReport> {
    let s = &m.support;
    let widest = s
        .intervals()
        .max_by(|x, y| (x.1 - x.0).total_cmp(&(y.1 - y.0)))
        .unwrap();
    let x_star = 0.5 * (widest.0 + widest.1);
    let robin = m.potential(x_star) - m.weight.log_weight(x_star);
    let energy = robin - m.log_weight_integral();

    // sample points spread over the components in proportion to their length
    let total: f64 = s.intervals().map(|(lo, hi)| hi - lo).sum();
    let mut residual = 0.0f64;
    for (lo, hi) in s.intervals() {
        let count = ((CONSTANCY_POINTS as f64 * (hi - lo) / total).round() as usize).max(1);
        for x in interior_points(lo, hi, count) {
            let dev = (m.potential(x) - m.weight.log_weight(x) - robin).abs();
            residual = residual.max(dev);
        }
    }
    if !(residual <= CONSTANCY_TOL) {
        return Err(Error::ConstancyViolation(residual));
    }
    Ok(CapacityReport {
        robin_constant: robin,
        energy,
        capacity: (-energy).exp(),
        equilibrium_constancy_residual: residual,
    })
}

/// Smallest value of `U - log w - F_w` over `probes` equally spaced points of
/// `[a, b]` outside the support (zeros of `w` excluded). Nonnegative when the
/// inequality off the support holds.
pub fn off_support_margin(m: &EquilibriumMeasure, report: &CapacityReport, probes: usize) -> f64 {
    let (a, b) = m.weight.interval;
    let mut margin = f64::INFINITY;
    let mut seen = 0;
    let mut n = probes.max(1);
    // refine the scan until enough points fall off the support
    while seen < probes && n <= 64 * probes.max(1) {
        seen = 0;
        margin = f64::INFINITY;
        for i in 0..n {
            let x = a + (b - a) * (i as f64 + 0.5) / n as f64;
            if m.support.contains(x) || m.weight.zeros.contains(&x) {
                continue;
            }
            seen += 1;
            margin = margin.min(m.potential(x) - m.weight.log_weight(x) - report.robin_constant);
        }
        n *= 2;
    }
    margin
}
