use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use super::{interior_points, jacobi, sqrt_abs_r, support, SolverOptions, SupportConfig};
use crate::error::{Error, Result};
use crate::poly;
use crate::quadrature::{log_potential, ChebyshevSeries};
use crate::weightspec::RootWeight;

/// Density of the equilibrium measure together with the data it was built from.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumMeasure {
    pub weight: RootWeight,
    pub support: SupportConfig,
    /// Ascending coefficients of `P`, degree `K - L - 1` (empty for constant weights).
    pub p_coeffs: Vec<f64>,
    /// Leading coefficient of `P` as recovered from the endpoint data.
    pub leading_coefficient: f64,
    /// Largest coefficient of `P` above degree `K - L - 1`; zero in exact arithmetic.
    pub excess_coefficient: f64,
    #[serde(skip)]
    components: Vec<ChebyshevSeries>,
}

impl EquilibriumMeasure {
    /// Builds the density on `support` from the endpoint conditions alone.
    ///
    /// `P / prod (x - z_j)` is expanded in partial fractions whose residues are
    /// fixed by the values of `P` at the zeros; the polynomial is read off from
    /// that expansion and its top coefficients are kept as diagnostics.
    pub fn from_support(w: &RootWeight, support: SupportConfig) -> Result<Self> {
        let k = w.num_zeros();
        let l_count = support.num_intervals();
        if k == 0 {
            if l_count != 1 {
                return Err(Error::Invalid("a constant weight has a single support interval".into()));
            }
            let (lo, hi) = support.interval(0);
            let series = ChebyshevSeries::interpolate(|_| 1.0 / PI, lo, hi, 1)?;
            return Ok(EquilibriumMeasure {
                weight: w.clone(),
                support,
                p_coeffs: Vec::new(),
                leading_coefficient: 1.0,
                excess_coefficient: 0.0,
                components: vec![series],
            });
        }
        if !w.vanishes_at_ends() {
            return Err(Error::Invalid(
                "the weight must vanish at both interval ends".into(),
            ));
        }
        let full = full_p(w, &support);
        let degree = k - l_count - 1;
        let leading_coefficient = full[degree];
        let excess_coefficient = full[degree + 1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut m = EquilibriumMeasure {
            weight: w.clone(),
            support,
            p_coeffs: full[..=degree].to_vec(),
            leading_coefficient,
            excess_coefficient,
            components: Vec::new(),
        };
        let mut components = Vec::with_capacity(l_count);
        for l in 0..l_count {
            let (lo, hi) = m.support.interval(l);
            components.push(ChebyshevSeries::fit(|x| m.smooth_part(l, x), lo, hi)?);
        }
        m.components = components;
        Ok(m)
    }

    pub fn num_intervals(&self) -> usize {
        self.support.num_intervals()
    }

    /// Chebyshev fits of `density * sqrt((x - a_l)(b_l - x))` per interval.
    pub fn components(&self) -> &[ChebyshevSeries] {
        &self.components
    }

    /// `density(x) * sqrt((x - a_l)(b_l - x))` on interval `l`, from the formula.
    pub fn smooth_part(&self, l: usize, x: f64) -> f64 {
        if self.weight.num_zeros() == 0 {
            return 1.0 / PI;
        }
        let (lo, hi) = self.support.interval(l);
        let p = self.weight.total_exponent();
        let rest = sqrt_abs_r(&self.support.endpoints, x, Some(l));
        let denom: f64 = self.weight.zeros.iter().map(|&z| x - z).product();
        self.support.component_sign(l) * (1.0 + p) * (x - lo) * (hi - x) * rest
            * poly::eval(&self.p_coeffs, x)
            / (PI * denom)
    }

    /// Density with respect to Lebesgue measure; zero off the support.
    pub fn density(&self, x: f64) -> f64 {
        let Some(l) = self.support.component_of(x) else {
            return 0.0;
        };
        let (lo, hi) = self.support.interval(l);
        if self.weight.num_zeros() == 0 {
            return 1.0 / (PI * ((x - lo) * (hi - x)).sqrt());
        }
        let p = self.weight.total_exponent();
        let root = sqrt_abs_r(&self.support.endpoints, x, None);
        let denom: f64 = self.weight.zeros.iter().map(|&z| x - z).product();
        self.support.component_sign(l) * (1.0 + p) * root * poly::eval(&self.p_coeffs, x) / (PI * denom)
    }

    pub fn mass(&self) -> f64 {
        self.components.iter().map(ChebyshevSeries::weighted_integral).sum()
    }

    /// Logarithmic potential `-int log|x - t| d mu(t)`.
    pub fn potential(&self, x: f64) -> f64 {
        log_potential(&self.components, x)
    }

    /// `int log w d mu`, using `log w = log A + sum p_j log|x - z_j|`.
    pub fn log_weight_integral(&self) -> f64 {
        let w = &self.weight;
        w.log_a
            - w.zeros
                .iter()
                .zip(&w.exponents)
                .map(|(&z, &p)| p * self.potential(z))
                .sum::<f64>()
    }

    /// Smallest density value on `per_interval` evenly spaced interior points
    /// of every interval.
    pub fn min_density(&self, per_interval: usize) -> f64 {
        let mut min = f64::INFINITY;
        for (lo, hi) in self.support.intervals() {
            for i in 0..per_interval {
                let x = lo + (hi - lo) * (i as f64 + 0.5) / per_interval as f64;
                min = min.min(self.density(x));
            }
        }
        min
    }

    /// Largest `|density(x) - density(m(x))|` under the reflection `m` of `[a, b]`.
    pub fn reflection_asymmetry(&self, per_interval: usize) -> f64 {
        let (a, b) = self.weight.interval;
        let mut worst = 0.0f64;
        for (lo, hi) in self.support.intervals() {
            for x in interior_points(lo, hi, per_interval) {
                worst = worst.max((self.density(x) - self.density(a + b - x)).abs());
            }
        }
        worst
    }

    /// Checks unit mass, monic `P` and positivity.
    pub fn validate(&self, opts: &SolverOptions) -> Result<()> {
        let mass = self.mass();
        if !((mass - 1.0).abs() <= 1e-6) {
            return Err(Error::MassDeviation(mass));
        }
        if !((self.leading_coefficient - 1.0).abs() <= 1e-9) {
            return Err(Error::NoFeasibleSupport(format!(
                "recovered leading coefficient {} is not 1",
                self.leading_coefficient
            )));
        }
        let min = self.min_density(opts.positivity_points);
        if !(min >= opts.positivity_tol) {
            return Err(Error::NoFeasibleSupport(format!("density reaches {min:e}")));
        }
        Ok(())
    }

    /// `samples` equally spaced cell midpoints of `[a, b]` with their density.
    pub fn sample_density(&self, samples: usize) -> Vec<(f64, f64)> {
        let (a, b) = self.weight.interval;
        (0..samples)
            .map(|i| {
                let x = a + (b - a) * (i as f64 + 0.5) / samples as f64;
                (x, self.density(x))
            })
            .collect()
    }

    /// CSV export with header `x,density`.
    pub fn density_csv(&self, samples: usize) -> String {
        let mut out = String::from("x,density\n");
        for (x, d) in self.sample_density(samples) {
            let _ = writeln!(out, "{x},{d}");
        }
        out
    }
}

/// Coefficients (ascending, length `K`) of `sum_j c_j prod_{m != j} (x - z_m)`.
fn full_p(w: &RootWeight, s: &SupportConfig) -> Vec<f64> {
    let k = w.num_zeros();
    let l_count = s.num_intervals();
    let p = w.total_exponent();
    let mut out = vec![0.0; k];
    for j in 0..k {
        let sign = if (l_count + s.gap_assignment[j]) % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign * w.exponents[j] / ((1.0 + p) * sqrt_abs_r(&s.endpoints, w.zeros[j], None));
        let others: Vec<f64> = (0..k).filter(|&m| m != j).map(|m| w.zeros[m]).collect();
        for (o, v) in out.iter_mut().zip(poly::from_roots(&others)) {
            *o += c * v;
        }
    }
    out
}

/// Equilibrium measure with default solver options.
pub fn solve_equilibrium(w: &RootWeight) -> Result<EquilibriumMeasure> {
    solve_equilibrium_with(w, &SolverOptions::default())
}

/// Equilibrium measure of `w`: arcsine law for constant weights, closed form
/// for two zeros, support detection otherwise.
pub fn solve_equilibrium_with(w: &RootWeight, opts: &SolverOptions) -> Result<EquilibriumMeasure> {
    let m = match w.num_zeros() {
        0 => {
            let (a, b) = w.interval;
            EquilibriumMeasure::from_support(w, SupportConfig::new(w, vec![a, b])?)?
        }
        _ if !w.vanishes_at_ends() => {
            return Err(Error::Invalid(
                "the weight must vanish at both interval ends".into(),
            ))
        }
        2 => jacobi::transplanted(w)?,
        _ => {
            let s = support::determine_support(w, opts)?;
            EquilibriumMeasure::from_support(w, s)?
        }
    };
    m.validate(opts)?;
    Ok(m)
}
