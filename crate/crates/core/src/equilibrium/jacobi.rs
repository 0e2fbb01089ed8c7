//! Closed-form support for two-zero (Jacobi-type) weights.

use super::measure::EquilibriumMeasure;
use super::SupportConfig;
use crate::error::{Error, Result};
use crate::weightspec::RootWeight;

/// Support endpoints `(a_1, b_1)` of `x^{p1} (1 - x)^{p2}` on `[0, 1]`.
pub fn jacobi_endpoints(p1: f64, p2: f64) -> Result<(f64, f64)> {
    if !(p1.is_finite() && p2.is_finite() && p1 > 0.0 && p2 > 0.0) {
        return Err(Error::Invalid(format!("exponents must be positive, got {p1} and {p2}")));
    }
    let total = 1.0 + p1 + p2;
    let (r1, r2) = (p1 / total, p2 / total);
    let s = 1.0 + r1 * r1 - r2 * r2;
    let disc = s * s - 4.0 * r1 * r1;
    let b1 = 0.5 * (s + disc.max(0.0).sqrt());
    // a_1 b_1 = r_1^2, which avoids cancellation when r_1 is small
    let a1 = r1 * r1 / b1;
    Ok((a1, b1))
}

/// Equilibrium measure of `x^{p1} (1 - x)^{p2}` on `[0, 1]`.
pub fn solve_jacobi(p1: f64, p2: f64) -> Result<EquilibriumMeasure> {
    let w = RootWeight::jacobi(p1, p2)?;
    transplanted(&w)
}

/// Any two-zero weight `A |x - a|^{p1} |x - b|^{p2}` on `[a, b]`, by the
/// affine map from `[0, 1]`.
pub(crate) fn transplanted(w: &RootWeight) -> Result<EquilibriumMeasure> {
    if w.num_zeros() != 2 || !w.vanishes_at_ends() {
        return Err(Error::Invalid("closed form needs zeros exactly at both ends".into()));
    }
    let (a, b) = w.interval;
    let (t1, t2) = jacobi_endpoints(w.exponents[0], w.exponents[1])?;
    let support = SupportConfig::new(w, vec![a + (b - a) * t1, a + (b - a) * t2])?;
    EquilibriumMeasure::from_support(w, support)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_for_tied_exponents() {
        let (a1, b1) = jacobi_endpoints(0.195, 0.195).unwrap();
        let r: f64 = 0.195 / 1.39;
        let direct = 0.5 * (1.0 - (1.0 - 4.0 * r * r).sqrt());
        assert!((a1 - direct).abs() < 1e-15);
        assert!((a1 - 0.020084).abs() < 1e-6);
        assert!((b1 - 0.979916).abs() < 1e-6);
        assert!((a1 + b1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn endpoints_in_small_exponent_limit() {
        let (a1, b1) = jacobi_endpoints(1e-6, 1e-6).unwrap();
        assert!(a1 > 0.0 && a1 < 1e-11);
        assert!(b1 < 1.0 && b1 > 1.0 - 1e-11);
        assert!(jacobi_endpoints(0.0, 1.0).is_err());
    }

    #[test]
    fn endpoints_satisfy_defining_equations() {
        // sqrt(a_1 b_1) = r_1 and sqrt((1 - a_1)(1 - b_1)) = r_2
        for &(p1, p2) in &[(0.3, 2.0), (4.0, 0.07), (1.0, 1.0)] {
            let (a1, b1) = jacobi_endpoints(p1, p2).unwrap();
            let t = 1.0 + p1 + p2;
            assert!(((a1 * b1).sqrt() - p1 / t).abs() < 1e-14);
            assert!((((1.0 - a1) * (1.0 - b1)).sqrt() - p2 / t).abs() < 1e-14);
        }
    }
}
