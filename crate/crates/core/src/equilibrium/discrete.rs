//! Discretized weighted energy problem, used to seed support detection.

use serde::Serialize;

use super::solve_dense;
use crate::error::{Error, Result};
use crate::weightspec::RootWeight;

const MAX_PIVOTS: usize = 200;
const MASS_EPS: f64 = 1e-15;
const DUAL_EPS: f64 = 1e-12;

/// Point masses on a uniform grid of `[a, b]`.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteMeasure {
    pub points: Vec<f64>,
    pub masses: Vec<f64>,
    /// `sum_{i != j} m_i m_j log(1/|x_i - x_j|) - 2 sum_i m_i log w(x_i)`.
    pub energy: f64,
    pub pivots: usize,
    /// False when the pivoting cap was hit; the masses are then the last
    /// iterate clipped to the simplex.
    pub converged: bool,
    /// Grid spacing.
    pub cell: f64,
}

/// A run of charged grid points not separated by a zero of the weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

impl DiscreteMeasure {
    /// Total mass of grid points in `[lo, hi]`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.masses)
            .filter(|(&x, _)| lo <= x && x <= hi)
            .map(|(_, &m)| m)
            .sum()
    }

    /// Groups points carrying at least `threshold * max mass` into clusters,
    /// splitting wherever a zero of `w` separates neighbours. Cluster extents
    /// reach half a cell beyond the outermost charged points.
    pub fn clusters(&self, w: &RootWeight, threshold: f64) -> Vec<Cluster> {
        let max = self.masses.iter().fold(0.0f64, |m, &v| m.max(v));
        let cut = threshold * max;
        let mut out: Vec<Cluster> = Vec::new();
        let mut last: Option<f64> = None;
        for (&x, &m) in self.points.iter().zip(&self.masses) {
            if m < cut || m <= 0.0 {
                last = None;
                continue;
            }
            let joined = match (last, out.last_mut()) {
                (Some(prev), Some(c)) if !w.zeros.iter().any(|&z| prev < z && z < x) => {
                    c.hi = x;
                    c.mass += m;
                    true
                }
                _ => false,
            };
            if !joined {
                out.push(Cluster { lo: x, hi: x, mass: m });
            }
            last = Some(x);
        }
        let half = 0.5 * self.cell;
        for c in &mut out {
            c.lo -= half;
            c.hi += half;
        }
        out
    }
}

/// Minimizes the discretized weighted energy over probability vectors on a
/// grid of cell midpoints, skipping points within `(b - a) / grid_size` of a
/// zero.
///
/// The quadratic program is solved exactly by block principal pivoting on its
/// optimality conditions. Distances are measured in units of `b - a`, which
/// shifts the energy by a constant and makes the kernel positive definite; the
/// diagonal carries the self-energy `-log h + 3/2` of a uniform cell of width `h`.
pub fn discrete_energy_minimize(w: &RootWeight, grid_size: usize) -> Result<DiscreteMeasure> {
    if grid_size < 200 {
        return Err(Error::Invalid(format!("grid size {grid_size} is below 200")));
    }
    let (a, b) = w.interval;
    let width = b - a;
    let cell = width / grid_size as f64;
    let points: Vec<f64> = (0..grid_size)
        .map(|i| a + cell * (i as f64 + 0.5))
        .filter(|&x| w.zeros.iter().all(|&z| (x - z).abs() > cell))
        .collect();
    let n = points.len();
    if n == 0 {
        return Err(Error::Invalid("no admissible grid points".into()));
    }
    let g: Vec<f64> = points.iter().map(|&x| w.log_weight(x)).collect();
    let diag = -(cell / width).ln() + 1.5;
    let kernel = |i: usize, j: usize| {
        if i == j {
            diag
        } else {
            -((points[i] - points[j]).abs() / width).ln()
        }
    };

    let mut free = vec![true; n];
    let mut masses = vec![0.0; n];
    let mut best_infeasible = usize::MAX;
    let mut chances = 3;
    let mut converged = false;
    let mut pivots = 0;
    while pivots < MAX_PIVOTS {
        pivots += 1;
        let idx: Vec<usize> = (0..n).filter(|&i| free[i]).collect();
        let f = idx.len();
        let mut mat = vec![0.0; (f + 1) * (f + 1)];
        let mut rhs = vec![0.0; f + 1];
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                mat[r * (f + 1) + c] = kernel(i, j);
            }
            mat[r * (f + 1) + f] = -1.0;
            mat[f * (f + 1) + r] = 1.0;
            rhs[r] = g[i];
        }
        rhs[f] = 1.0;
        let sol = solve_dense(f + 1, mat, rhs).ok_or(Error::SingularMomentSystem)?;
        let lambda = sol[f];
        masses.iter_mut().for_each(|m| *m = 0.0);
        for (r, &i) in idx.iter().enumerate() {
            masses[i] = sol[r];
        }
        let mut violators: Vec<usize> = Vec::new();
        for i in 0..n {
            if free[i] {
                if masses[i] < -MASS_EPS {
                    violators.push(i);
                }
            } else {
                let y: f64 = (0..n).filter(|&j| free[j]).map(|j| kernel(i, j) * masses[j]).sum::<f64>()
                    - g[i]
                    - lambda;
                if y < -DUAL_EPS {
                    violators.push(i);
                }
            }
        }
        if violators.is_empty() {
            converged = true;
            break;
        }
        if violators.len() < best_infeasible {
            best_infeasible = violators.len();
            chances = 3;
        } else if chances > 0 {
            chances -= 1;
        } else {
            violators = vec![*violators.iter().max().unwrap()];
        }
        for i in violators {
            free[i] = !free[i];
        }
    }

    for m in masses.iter_mut() {
        *m = m.max(0.0);
    }
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    let mut energy = 0.0;
    for i in 0..n {
        if masses[i] == 0.0 {
            continue;
        }
        energy -= 2.0 * masses[i] * g[i];
        for j in 0..n {
            if i != j {
                energy -= masses[i] * masses[j] * (points[i] - points[j]).abs().ln();
            }
        }
    }
    Ok(DiscreteMeasure { points, masses, energy, pivots, converged, cell })
}
