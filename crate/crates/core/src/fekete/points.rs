use serde::Serialize;

use crate::equilibrium::solve_dense;
use crate::error::{Error, Result};
use crate::weightspec::RootWeight;

const MAX_SWEEPS: usize = 500;
const IMPROVEMENT_TOL: f64 = 1e-12;

/// Maximizer of the weighted Vandermonde `prod_{i<j} |x_i - x_j| w(x_i) w(x_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeketeSet {
    pub n: usize,
    /// Sorted points.
    pub points: Vec<f64>,
    /// `log |V_n^w|` at the points.
    pub log_vandermonde: f64,
    /// `d_n = (max (V_n^w)^2)^{1 / (n (n - 1))}`.
    pub d_n: f64,
    pub sweeps: usize,
    /// Set when the sweep cap was reached before the improvement fell below tolerance.
    pub stagnated: bool,
}

/// `sum_{i<j} log|x_i - x_j| + (n - 1) sum_i log w(x_i)`.
pub fn log_vandermonde(w: &RootWeight, x: &[f64]) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += (n - 1) as f64 * w.log_weight(x[i]);
        for j in i + 1..n {
            acc += (x[i] - x[j]).abs().ln();
        }
    }
    acc
}

/// Objective as a function of coordinate `i` alone.
fn coordinate_objective(w: &RootWeight, x: &[f64], i: usize, t: f64) -> f64 {
    let n = x.len();
    let mut acc = (n - 1) as f64 * w.log_weight(t);
    for (j, &xj) in x.iter().enumerate() {
        if j != i {
            acc += (t - xj).abs().ln();
        }
    }
    acc
}

/// Golden-section maximum of a concave function on the open interval `(lo, hi)`.
fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let tol = 1e-15 * (lo.abs() + hi.abs()).max(1.0);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// One cyclic sweep; each coordinate is maximized between its neighbours,
/// piecewise between zeros of `w` (the objective is concave on each piece).
fn sweep(w: &RootWeight, x: &mut [f64]) {
    let n = x.len();
    let (a, b) = w.interval;
    for i in 0..n {
        let lo = if i == 0 { a } else { x[i - 1] };
        let hi = if i + 1 == n { b } else { x[i + 1] };
        let mut cuts = vec![lo];
        cuts.extend(w.zeros.iter().copied().filter(|&z| z > lo && z < hi));
        cuts.push(hi);
        let f = |t: f64| coordinate_objective(w, x, i, t);
        let (mut best_t, mut best_f) = (x[i], f(x[i]));
        for piece in cuts.windows(2) {
            if piece[1] <= piece[0] {
                continue;
            }
            let (t, ft) = golden_max(f, piece[0], piece[1]);
            if ft > best_f {
                best_t = t;
                best_f = ft;
            }
        }
        // interval ends are admissible when the weight does not vanish there
        for end in [a, b] {
            if end == lo || end == hi {
                let fe = f(end);
                if fe > best_f {
                    best_t = end;
                    best_f = fe;
                }
            }
        }
        x[i] = best_t;
    }
}

/// Newton steps with the analytic Hessian; coordinates sitting on an interval
/// end with outward-pointing gradient are held fixed.
fn polish(w: &RootWeight, x: &mut [f64]) {
    let n = x.len();
    let (a, b) = w.interval;
    let k = (n - 1) as f64;
    for _ in 0..50 {
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            let (d1, d2) = w.log_weight_derivatives(x[i]);
            grad[i] += k * d1;
            hess[i * n + i] += k * d2;
            for j in 0..n {
                if j != i {
                    let u = 1.0 / (x[i] - x[j]);
                    grad[i] += u;
                    hess[i * n + i] -= u * u;
                    hess[i * n + j] += u * u;
                }
            }
        }
        let free: Vec<usize> = (0..n)
            .filter(|&i| !((x[i] == a && grad[i] <= 0.0) || (x[i] == b && grad[i] >= 0.0)))
            .collect();
        if free.is_empty() {
            return;
        }
        let m = free.len();
        let mut sub = vec![0.0; m * m];
        for (r, &i) in free.iter().enumerate() {
            for (c, &j) in free.iter().enumerate() {
                sub[r * m + c] = hess[i * n + j];
            }
        }
        let rhs: Vec<f64> = free.iter().map(|&i| -grad[i]).collect();
        let Some(step) = solve_dense(m, sub, rhs) else {
            return;
        };
        let base = log_vandermonde(w, x);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let mut trial = x.to_vec();
            for (&i, s) in free.iter().zip(&step) {
                trial[i] = (trial[i] + lambda * s).clamp(a, b);
            }
            let ordered = trial.windows(2).all(|p| p[0] < p[1]);
            if ordered {
                let v = log_vandermonde(w, &trial);
                if v >= base {
                    let done = v - base <= 1e-15 * base.abs().max(1.0);
                    x.copy_from_slice(&trial);
                    accepted = true;
                    if done {
                        return;
                    }
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return;
        }
    }
}

/// Weighted Fekete points by cyclic coordinate ascent from Chebyshev-Lobatto
/// nodes, with Newton polishing between sweeps.
pub fn fekete_points(w: &RootWeight, n: usize) -> Result<FeketeSet> {
    if n < 2 {
        return Err(Error::Invalid("Fekete points need n >= 2".into()));
    }
    let (a, b) = w.interval;
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let nudge = 1e-2 * (b - a) / (n * n) as f64;
    let mut x: Vec<f64> = (0..n)
        .map(|k| {
            let t = mid - half * (k as f64 * std::f64::consts::PI / (n - 1) as f64).cos();
            if w.zeros.contains(&t) {
                if t + nudge <= b {
                    t + nudge
                } else {
                    t - nudge
                }
            } else {
                t
            }
        })
        .collect();
    x.sort_by(|p, q| p.total_cmp(q));
    let mut value = log_vandermonde(w, &x);
    let mut sweeps = 0;
    let mut stagnated = true;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        sweep(w, &mut x);
        polish(w, &mut x);
        let next = log_vandermonde(w, &x);
        let gain = next - value;
        value = next;
        if gain.abs() < IMPROVEMENT_TOL {
            stagnated = false;
            break;
        }
    }
    let pairs = (n * (n - 1)) as f64;
    Ok(FeketeSet {
        n,
        d_n: (2.0 * value / pairs).exp(),
        points: x,
        log_vandermonde: value,
        sweeps,
        stagnated,
    })
}

/// Fekete solves for `n = 2..=n_max`.
pub fn transfinite_sequence(w: &RootWeight, n_max: usize) -> Result<Vec<FeketeSet>> {
    (2..=n_max).map(|n| fekete_points(w, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unweighted_small_cases() {
        let w = RootWeight::constant((0.0, 1.0), 0.0).unwrap();
        let f2 = fekete_points(&w, 2).unwrap();
        assert_eq!(f2.points, vec![0.0, 1.0]);
        assert!((f2.d_n - 1.0).abs() < 1e-15);
        let f3 = fekete_points(&w, 3).unwrap();
        assert!((f3.points[1] - 0.5).abs() < 1e-9, "{:?}", f3.points);
        assert!((f3.log_vandermonde.exp() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn unweighted_sequence_approaches_quarter() {
        let w = RootWeight::constant((0.0, 1.0), 0.0).unwrap();
        let seq = transfinite_sequence(&w, 10).unwrap();
        let d10 = seq.last().unwrap().d_n;
        // endpoints plus the roots of P_9', mapped to [0, 1]
        assert!((d10 - 0.350854831246320).abs() < 1e-11, "{d10}");
        for pair in seq.windows(2) {
            assert!(pair[1].d_n <= pair[0].d_n + 1e-9);
        }
    }

    #[test]
    fn jacobi_points_stay_interior() {
        let w = RootWeight::jacobi(0.195, 0.195).unwrap();
        let f = fekete_points(&w, 20).unwrap();
        assert!(!f.stagnated);
        assert!(f.points.iter().all(|&p| p > 0.0 && p < 1.0));
        assert!(f.d_n >= 0.1045575588 - 1e-9);
    }

    #[test]
    fn coordinatewise_local_maximum() {
        let w = RootWeight::jacobi(0.5, 1.5).unwrap();
        let f = fekete_points(&w, 7).unwrap();
        for i in 0..7 {
            for h in [1e-6, -1e-6] {
                let mut y = f.points.clone();
                y[i] += h;
                assert!(log_vandermonde(&w, &y) <= f.log_vandermonde + 1e-14);
            }
        }
    }
}
