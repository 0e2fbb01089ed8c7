//! Independent reconstruction of the equilibrium density as a signed
//! combination of harmonic measures of the complement of the support:
//!
//! `mu = (1 + p) omega(inf) - sum_j p_j omega(z_j)`.
//!
//! On interval `l` the harmonic measures have densities
//! `s_l T(x) / (pi sqrt|R(x)|)` and `s_l T_j(x) / (pi (x - z_j) sqrt|R(x)|)`
//! with `deg T, deg T_j <= L - 1`; the polynomials are fixed by vanishing
//! (principal-value) integrals over the inner gaps plus unit mass.

use std::f64::consts::PI;

use super::measure::EquilibriumMeasure;
use super::{interior_points, solve_dense, sqrt_abs_r, SupportConfig};
use crate::error::{Error, Result};
use crate::poly;
use crate::quadrature::{
    integrate_sqrt_singular, integrate_sqrt_singular_adaptive, principal_value_gap_adaptive,
    GapIntegralSpec,
};
use crate::weightspec::RootWeight;

const CHECK_POINTS: usize = 200;

/// Harmonic measures at infinity and at each zero, as polynomial numerators
/// in the scaled variable `u = (x - center) / half`.
#[derive(Debug, Clone)]
pub struct HarmonicMeasures {
    pub support: SupportConfig,
    pub zeros: Vec<f64>,
    center: f64,
    half: f64,
    pub t_infinity: Vec<f64>,
    pub t_zeros: Vec<Vec<f64>>,
}

/// `sqrt|R(x)|` without the two endpoints bounding inner gap `l`.
fn sqrt_abs_r_off_gap(endpoints: &[f64], x: f64, l: usize) -> f64 {
    endpoints
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != 2 * l - 1 && i != 2 * l)
        .map(|(_, &e)| (x - e).abs())
        .product::<f64>()
        .sqrt()
}

impl HarmonicMeasures {
    pub fn new(w: &RootWeight, s: &SupportConfig) -> Result<Self> {
        let e = &s.endpoints;
        let l_count = s.num_intervals();
        let (lo, hi) = (e[0], *e.last().unwrap());
        let (center, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let u = |x: f64, k: usize| ((x - center) / half).powi(k as i32);
        // u^k as ascending coefficients in x
        let u_coeffs = |k: usize| -> Vec<f64> {
            poly::from_roots(&vec![center; k]).into_iter().map(|c| c / half.powi(k as i32)).collect()
        };

        // unit-mass row for a density with numerator u^k and optional pole
        let mass_row = |pole: Option<f64>| -> Result<Vec<f64>> {
            (0..l_count)
                .map(|k| {
                    let mut acc = 0.0;
                    for comp in 0..l_count {
                        let (a, b) = s.interval(comp);
                        let f = |x: f64| {
                            let q = pole.map_or(1.0, |z| x - z);
                            u(x, k) / (q * sqrt_abs_r(e, x, Some(comp)))
                        };
                        acc += s.component_sign(comp) * integrate_sqrt_singular_adaptive(f, a, b)? / PI;
                    }
                    Ok(acc)
                })
                .collect()
        };

        let solve = |rows: Vec<Vec<f64>>| -> Result<Vec<f64>> {
            let n = rows.len();
            let mut rhs = vec![0.0; n];
            rhs[n - 1] = 1.0;
            let flat: Vec<f64> = rows.into_iter().flatten().collect();
            let sol = solve_dense(n, flat, rhs).ok_or(Error::SingularMomentSystem)?;
            if sol.iter().any(|v| v.abs() > 1e12) {
                return Err(Error::SingularMomentSystem);
            }
            Ok(sol)
        };

        let mut rows = Vec::with_capacity(l_count);
        for l in 1..l_count {
            let (c, d) = (e[2 * l - 1], e[2 * l]);
            let row = (0..l_count)
                .map(|k| integrate_sqrt_singular_adaptive(|x| u(x, k) / sqrt_abs_r_off_gap(e, x, l), c, d))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        rows.push(mass_row(None)?);
        let t_infinity = solve(rows)?;

        let mut t_zeros = Vec::with_capacity(w.num_zeros());
        for &z in &w.zeros {
            let mut rows = Vec::with_capacity(l_count);
            for l in 1..l_count {
                let row = (0..l_count)
                    .map(|k| {
                        principal_value_gap_adaptive(&GapIntegralSpec {
                            gap: (e[2 * l - 1], e[2 * l]),
                            endpoints: e.clone(),
                            zeros: vec![z],
                            p_coeffs: u_coeffs(k),
                            reciprocal_sqrt: true,
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                rows.push(row);
            }
            rows.push(mass_row(Some(z))?);
            t_zeros.push(solve(rows)?);
        }
        Ok(HarmonicMeasures {
            support: s.clone(),
            zeros: w.zeros.clone(),
            center,
            half,
            t_infinity,
            t_zeros,
        })
    }

    fn numerator(&self, coeffs: &[f64], x: f64) -> f64 {
        poly::eval(coeffs, (x - self.center) / self.half)
    }

    /// Density of `omega(inf)`; zero off the support.
    pub fn density_infinity(&self, x: f64) -> f64 {
        let Some(l) = self.support.component_of(x) else {
            return 0.0;
        };
        self.support.component_sign(l) * self.numerator(&self.t_infinity, x)
            / (PI * sqrt_abs_r(&self.support.endpoints, x, None))
    }

    /// Density of `omega(z_j)`; zero off the support.
    pub fn density_at_zero(&self, j: usize, x: f64) -> f64 {
        let Some(l) = self.support.component_of(x) else {
            return 0.0;
        };
        self.support.component_sign(l) * self.numerator(&self.t_zeros[j], x)
            / (PI * (x - self.zeros[j]) * sqrt_abs_r(&self.support.endpoints, x, None))
    }

    /// `(1 + p) omega(inf) - sum_j p_j omega(z_j)` as a density.
    pub fn combined_density(&self, exponents: &[f64], x: f64) -> f64 {
        let p: f64 = exponents.iter().sum();
        (1.0 + p) * self.density_infinity(x)
            - exponents
                .iter()
                .enumerate()
                .map(|(j, &pj)| pj * self.density_at_zero(j, x))
                .sum::<f64>()
    }

    /// Total masses of `omega(inf)` and of each `omega(z_j)`, from a fixed
    /// 4096-node rule (the construction used the adaptive rule).
    pub fn masses(&self) -> Result<Vec<f64>> {
        let e = &self.support.endpoints;
        let mass = |pole: Option<usize>| -> Result<f64> {
            let mut acc = 0.0;
            for comp in 0..self.support.num_intervals() {
                let (a, b) = self.support.interval(comp);
                let f = |x: f64| {
                    let (t, q) = match pole {
                        None => (self.numerator(&self.t_infinity, x), 1.0),
                        Some(j) => (self.numerator(&self.t_zeros[j], x), x - self.zeros[j]),
                    };
                    t / (q * sqrt_abs_r(e, x, Some(comp)))
                };
                acc += self.support.component_sign(comp) * integrate_sqrt_singular(f, a, b, 4096)? / PI;
            }
            Ok(acc)
        };
        let mut out = vec![mass(None)?];
        for j in 0..self.zeros.len() {
            out.push(mass(Some(j))?);
        }
        Ok(out)
    }
}

/// Largest deviation between the harmonic-measure combination and the
/// equilibrium density over interior check points of every interval.
pub fn harmonic_cross_check(w: &RootWeight, s: &SupportConfig) -> Result<f64> {
    let h = HarmonicMeasures::new(w, s)?;
    let m = EquilibriumMeasure::from_support(w, s.clone())?;
    let mut worst = 0.0f64;
    for (lo, hi) in s.intervals() {
        for x in interior_points(lo, hi, CHECK_POINTS) {
            worst = worst.max((h.combined_density(&w.exponents, x) - m.density(x)).abs());
        }
    }
    Ok(worst)
}
