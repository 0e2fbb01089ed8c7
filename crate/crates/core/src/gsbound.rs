//! The coefficient `B(w) = -2 log c_w / (4 alpha + 3)` in the lower bound
//! `int_1^x psi(t) dt >= B(w) x^2 / 2 (1 + o(1))`, and its maximization over
//! the exponents of a fixed set of factor polynomials on `[0, 1]`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::equilibrium::{capacity, solve_equilibrium};
use crate::error::{Error, Result};
use crate::weightspec::{to_root_form, Factor, FactoredWeight, DEFAULT_ROOT_TOL};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub weight: String,
    /// Aggregate exponent `sum_i alpha_i deg Q_i`.
    pub alpha: f64,
    pub c_w: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "B_lt_1")]
    pub b_lt_1: bool,
}

pub fn bound_from_capacity(c_w: f64, alpha: f64) -> f64 {
    -2.0 * c_w.ln() / (4.0 * alpha + 3.0)
}

/// Solves the equilibrium problem for `fw` and returns `B(w)`.
///
/// `B < 1` holds for every admissible weight; a computed value at or above one
/// means the capacity is wrong and is reported as [`Error::BoundViolation`].
pub fn bound_coefficient(fw: &FactoredWeight) -> Result<BoundReport> {
    if fw.interval != (0.0, 1.0) {
        return Err(Error::Invalid(format!(
            "the bound needs a weight on [0, 1], got [{}, {}]",
            fw.interval.0, fw.interval.1
        )));
    }
    let rw = to_root_form(fw, DEFAULT_ROOT_TOL)?;
    let report = capacity(&solve_equilibrium(&rw)?)?;
    let alpha = fw.aggregate_exponent();
    let b = bound_from_capacity(report.capacity, alpha);
    if !(b < 1.0) {
        return Err(Error::BoundViolation(b));
    }
    Ok(BoundReport {
        weight: fw.to_string(),
        alpha,
        c_w: report.capacity,
        b,
        b_lt_1: true,
    })
}

/// `B` as a function of the exponents of fixed factor polynomials, memoized
/// on exponents rounded to `1e-12`. A zero exponent drops its factor.
#[derive(Debug, Clone)]
pub struct BoundObjective {
    polys: Vec<Vec<i64>>,
    cache: HashMap<Vec<i64>, Option<BoundReport>>,
    evaluations: usize,
}

impl BoundObjective {
    pub fn new(polys: Vec<Vec<i64>>) -> Self {
        BoundObjective { polys, cache: HashMap::new(), evaluations: 0 }
    }

    pub fn weight(&self, exponents: &[f64]) -> Result<FactoredWeight> {
        if exponents.len() != self.polys.len() {
            return Err(Error::Invalid("one exponent per factor is required".into()));
        }
        let factors = self
            .polys
            .iter()
            .zip(exponents)
            .filter(|(_, &e)| e != 0.0)
            .map(|(q, &e)| Factor::new(q.clone(), e))
            .collect();
        FactoredWeight::new((0.0, 1.0), factors)
    }

    /// Report at `exponents`, or `None` when the solve fails there.
    pub fn evaluate(&mut self, exponents: &[f64]) -> Option<BoundReport> {
        let key: Vec<i64> = exponents.iter().map(|e| (e * 1e12).round() as i64).collect();
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        self.evaluations += 1;
        let report = self.weight(exponents).and_then(|fw| bound_coefficient(&fw)).ok();
        self.cache.insert(key, report.clone());
        report
    }

    /// `B`, or `-inf` where the solve fails.
    pub fn value(&mut self, exponents: &[f64]) -> f64 {
        self.evaluate(exponents).map_or(f64::NEG_INFINITY, |r| r.b)
    }

    /// Number of distinct equilibrium solves so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    pub lower: f64,
    pub upper: f64,
    pub max_evals: usize,
    /// Spread of objective values across the simplex at which a run stops.
    pub f_tol: f64,
    /// Simplex diameter at which a run stops.
    pub x_tol: f64,
    pub initial_step: f64,
    pub max_restarts: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            lower: 1e-4,
            upper: 10.0,
            max_evals: 600,
            f_tol: 1e-11,
            x_tol: 1e-7,
            initial_step: 0.05,
            max_restarts: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    pub exponents: Vec<f64>,
    pub report: BoundReport,
    pub evaluations: usize,
}

/// Maximizes `B` over the exponents flagged in `free`, starting from `alpha0`;
/// the others stay at their `alpha0` values (zero drops the factor).
///
/// Nelder-Mead with every vertex projected onto the box, restarted from a
/// fresh simplex around the best point until a restart stops improving.
pub fn optimize_exponents(
    polys: &[Vec<i64>],
    alpha0: &[f64],
    free: &[bool],
    opts: &OptimizeOptions,
) -> Result<Optimum> {
    if alpha0.len() != polys.len() || free.len() != polys.len() {
        return Err(Error::Invalid("exponent and mask lengths must match the factors".into()));
    }
    let mut obj = BoundObjective::new(polys.to_vec());
    let dims: Vec<usize> = (0..polys.len()).filter(|&i| free[i]).collect();
    let clamp = |v: f64| v.clamp(opts.lower, opts.upper);
    let embed = |y: &[f64]| {
        let mut full = alpha0.to_vec();
        for (&d, &v) in dims.iter().zip(y) {
            full[d] = clamp(v);
        }
        full
    };
    let mut best: Vec<f64> = dims.iter().map(|&d| clamp(alpha0[d])).collect();
    let mut best_f = -obj.value(&embed(&best));

    if !dims.is_empty() {
        for _ in 0..=opts.max_restarts {
            let (x, f) = nelder_mead(&mut |y| -obj.value(&embed(y)), &best, opts, &clamp);
            let gained = best_f - f;
            if f < best_f {
                best = x;
                best_f = f;
            }
            if !(gained > opts.f_tol) || obj.evaluations() >= opts.max_evals {
                break;
            }
        }
    }
    let exponents = embed(&best);
    let report = obj
        .evaluate(&exponents)
        .ok_or_else(|| Error::NoFeasibleSupport("no exponent vector could be evaluated".into()))?;
    Ok(Optimum { exponents, report, evaluations: obj.evaluations() })
}

fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    start: &[f64],
    opts: &OptimizeOptions,
    clamp: &dyn Fn(f64) -> f64,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let project = |v: Vec<f64>| v.into_iter().map(clamp).collect::<Vec<f64>>();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let x0 = project(start.to_vec());
    let f0 = f(&x0);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut v = x0.clone();
        v[i] += opts.initial_step;
        if clamp(v[i]) == x0[i] {
            v[i] = x0[i] - opts.initial_step;
        }
        let v = project(v);
        let fv = f(&v);
        simplex.push((v, fv));
    }
    let mut evals = n + 1;
    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    };
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if (spread.abs() < opts.f_tol || spread.is_nan()) && diameter < opts.x_tol {
            break;
        }
        if diameter < 1e-14 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(v, _)| v[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let reflected = project(combine(&centroid, &worst.0, -1.0));
        let fr = f(&reflected);
        evals += 1;
        if fr < simplex[0].1 {
            let expanded = project(combine(&centroid, &worst.0, -2.0));
            let fe = f(&expanded);
            evals += 1;
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (target, ft) = if fr < worst.1 { (&reflected, fr) } else { (&worst.0, worst.1) };
        let contracted = project(combine(&centroid, target, 0.5));
        let fc = f(&contracted);
        evals += 1;
        if fc < ft {
            simplex[n] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let v = project(combine(&best, &vertex.0, 0.5));
            let fv = f(&v);
            *vertex = (v, fv);
            evals += 1;
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// `B` with every exponent set to `t`.
pub fn tied_bound(polys: &[Vec<i64>], t: f64) -> Result<BoundReport> {
    let fw = BoundObjective::new(polys.to_vec()).weight(&vec![t; polys.len()])?;
    bound_coefficient(&fw)
}

/// Golden-section maximization of `B` over a common exponent `t in [lo, hi]`,
/// stopping once the bracket is shorter than `tol`.
pub fn optimize_tied(polys: &[Vec<i64>], lo: f64, hi: f64, tol: f64) -> Result<Optimum> {
    if !(lo > 0.0 && hi > lo && tol > 0.0) {
        return Err(Error::Invalid(format!("bad bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let mut obj = BoundObjective::new(polys.to_vec());
    let k = polys.len();
    let mut g = |t: f64| obj.value(&vec![t; k]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d);
        }
    }
    let t = if fc >= fd { c } else { d };
    let exponents = vec![t; k];
    let report = obj
        .evaluate(&exponents)
        .ok_or_else(|| Error::NoFeasibleSupport(format!("solve failed at t = {t}")))?;
    Ok(Optimum { exponents, report, evaluations: obj.evaluations() })
}

/// `steps` equally spaced values of `t` from `t0` to `t1` inclusive.
pub fn sweep_points(t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..steps)
            .map(|i| t0 + (t1 - t0) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// CSV `t,B` for a tied-exponent sweep; failed points are written as `NaN`.
pub fn sweep_csv(rows: &[(f64, Option<f64>)]) -> String {
    let mut out = String::from("t,B\n");
    for (t, b) in rows {
        let _ = writeln!(out, "{t},{}", b.unwrap_or(f64::NAN));
    }
    out
}
