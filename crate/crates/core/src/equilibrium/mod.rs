//! Weighted equilibrium measures for weights `A prod_j |x - z_j|^{p_j}` whose
//! outermost zeros sit on the interval ends.
//!
//! The support is a union of `L` intervals avoiding the zeros. On the `l`-th
//! interval the density is
//!
//! `(-1)^{L+l+1} (1 + p) sqrt|R(x)| P(x) / (pi prod_j (x - z_j))`
//!
//! with `R` the product over the support endpoints and `P` monic of degree
//! `K - L - 1`.

mod capacity;
mod discrete;
mod harmonic;
mod jacobi;
mod measure;
mod support;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::weightspec::RootWeight;

pub use capacity::{capacity, off_support_margin, CapacityReport};
pub use discrete::{discrete_energy_minimize, DiscreteMeasure};
pub use harmonic::{harmonic_cross_check, HarmonicMeasures};
pub use jacobi::{jacobi_endpoints, solve_jacobi};
pub use measure::{solve_equilibrium, solve_equilibrium_with, EquilibriumMeasure};
pub use support::{determine_support, support_residual};

/// Tuning knobs for support detection.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Grid size of the discrete energy minimizer used as a seed.
    pub grid_size: usize,
    /// Relative mass threshold for a grid point to count as charged.
    pub mass_threshold: f64,
    /// Newton stops once the residual norm falls below this.
    pub newton_tol: f64,
    /// Largest residual norm accepted as a solution.
    pub accept_tol: f64,
    pub max_newton_iter: usize,
    pub max_halvings: usize,
    /// Finite-difference step relative to `b - a`.
    pub fd_step: f64,
    /// Check points per interval for the positivity test.
    pub positivity_points: usize,
    pub positivity_tol: f64,
    /// Intervals narrower than this are treated as collapsed.
    pub min_width: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_size: 400,
            mass_threshold: 1e-6,
            newton_tol: 1e-12,
            accept_tol: 1e-10,
            max_newton_iter: 200,
            max_halvings: 30,
            fd_step: 1e-7,
            positivity_points: 1000,
            positivity_tol: -1e-10,
            min_width: 1e-9,
        }
    }
}

/// A candidate support `[a_1, b_1] u ... u [a_L, b_L]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportConfig {
    /// Interleaved endpoints `a_1 < b_1 < ... < a_L < b_L`.
    pub endpoints: Vec<f64>,
    /// For each zero, the number of support intervals to its left.
    pub gap_assignment: Vec<usize>,
}

impl SupportConfig {
    /// Validates `endpoints` against the zeros of `w` and records which gap
    /// each zero falls in.
    pub fn new(w: &RootWeight, endpoints: Vec<f64>) -> Result<Self> {
        let (a, b) = w.interval;
        if endpoints.is_empty() || endpoints.len() % 2 != 0 {
            return Err(Error::Invalid("support needs an even, nonzero number of endpoints".into()));
        }
        if endpoints.iter().any(|e| !e.is_finite()) || endpoints.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::Invalid("support endpoints must be strictly increasing".into()));
        }
        if endpoints[0] < a || *endpoints.last().unwrap() > b {
            return Err(Error::Invalid("support endpoints must lie in the interval".into()));
        }
        let l_count = endpoints.len() / 2;
        let k = w.num_zeros();
        if k >= 2 && l_count > k - 1 {
            return Err(Error::Invalid(format!("{l_count} intervals exceed K - 1 = {}", k - 1)));
        }
        let mut gap_assignment = Vec::with_capacity(k);
        for &z in &w.zeros {
            let inside = endpoints.chunks(2).any(|iv| iv[0] <= z && z <= iv[1]);
            if inside {
                return Err(Error::Invalid(format!("zero {z} lies inside the support")));
            }
            gap_assignment.push(endpoints.chunks(2).filter(|iv| iv[1] < z).count());
        }
        for l in 1..l_count {
            if !gap_assignment.contains(&l) {
                return Err(Error::Invalid(format!("gap {l} of the support contains no zero")));
            }
        }
        Ok(SupportConfig { endpoints, gap_assignment })
    }

    pub fn num_intervals(&self) -> usize {
        self.endpoints.len() / 2
    }

    /// The `l`-th interval, counting from zero.
    pub fn interval(&self, l: usize) -> (f64, f64) {
        (self.endpoints[2 * l], self.endpoints[2 * l + 1])
    }

    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.endpoints.chunks(2).map(|iv| (iv[0], iv[1]))
    }

    /// Index of the interval containing `x`, if any.
    pub fn component_of(&self, x: f64) -> Option<usize> {
        self.intervals().position(|(lo, hi)| lo <= x && x <= hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.component_of(x).is_some()
    }

    /// Sign `(-1)^{L+l+1}` of the density on interval `l` (zero-based).
    pub fn component_sign(&self, l: usize) -> f64 {
        if (self.num_intervals() + l) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// `sqrt|R(x)|` over all endpoints, optionally skipping one interval's pair.
pub(crate) fn sqrt_abs_r(endpoints: &[f64], x: f64, skip: Option<usize>) -> f64 {
    endpoints
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i / 2) != skip)
        .map(|(_, &e)| (x - e).abs())
        .product::<f64>()
        .sqrt()
}

/// Chebyshev-interior points `mid + half cos((i + 1/2) pi / n)` on `[lo, hi]`.
pub(crate) fn interior_points(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    crate::quadrature::chebyshev_nodes(n).map(move |t| mid + half * t)
}

/// Dense solve through nalgebra's LU; `None` when the matrix is singular.
pub(crate) fn solve_dense(n: usize, a: Vec<f64>, b: Vec<f64>) -> Option<Vec<f64>> {
    let m = nalgebra::DMatrix::from_row_slice(n, n, &a);
    let lu = m.lu();
    let x = lu.solve(&nalgebra::DVector::from_vec(b))?;
    x.iter().all(|v| v.is_finite()).then(|| x.iter().copied().collect())
}
