//! Support detection: a discrete energy minimizer proposes the intervals, and
//! Newton's method on the endpoint conditions refines them.
//!
//! `P` is eliminated before the Newton solve. Its values at the zeros fix the
//! residues `c_j` of `P / prod (x - z_j)`, and `P` monic of degree `K - L - 1`
//! is equivalent to `sum_j c_j z_j^s = 0` for `s < L` and `= 1` for `s = L`.
//! Together with the `L - 1` principal-value conditions over the inner gaps
//! this gives `2L` equations in the `2L` endpoints.

use super::discrete::{discrete_energy_minimize, Cluster};
use super::measure::EquilibriumMeasure;
use super::{solve_dense, sqrt_abs_r, SolverOptions, SupportConfig};
use crate::error::{Error, Result};
use crate::poly;
use crate::quadrature::{principal_value_gap_adaptive, GapIntegralSpec};
use crate::weightspec::RootWeight;

/// Residuals of the endpoint conditions: `L + 1` moment conditions followed by
/// `L - 1` gap integrals, all scaled to be dimensionless.
pub fn support_residual(w: &RootWeight, endpoints: &[f64]) -> Result<Vec<f64>> {
    let s = SupportConfig::new(w, endpoints.to_vec())?;
    let l_count = s.num_intervals();
    let k = w.num_zeros();
    let p = w.total_exponent();
    let lo = endpoints[0];
    let hi = *endpoints.last().unwrap();
    let (center, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let hl = h.powi(l_count as i32);

    let rho: Vec<f64> = (0..k)
        .map(|j| {
            let sign = if (l_count + s.gap_assignment[j]) % 2 == 0 { 1.0 } else { -1.0 };
            sign * w.exponents[j] * hl / ((1.0 + p) * sqrt_abs_r(endpoints, w.zeros[j], None))
        })
        .collect();
    let u: Vec<f64> = w.zeros.iter().map(|&z| (z - center) / h).collect();

    let mut out = Vec::with_capacity(2 * l_count);
    for power in 0..=l_count {
        let m: f64 = rho.iter().zip(&u).map(|(r, x)| r * x.powi(power as i32)).sum();
        out.push(if power == l_count { m - 1.0 } else { m });
    }

    // h^L P, in monomials of x
    let mut scaled_p = vec![0.0; k];
    for j in 0..k {
        let others: Vec<f64> = (0..k).filter(|&m| m != j).map(|m| w.zeros[m]).collect();
        for (o, v) in scaled_p.iter_mut().zip(poly::from_roots(&others)) {
            *o += rho[j] * v;
        }
    }
    for l in 1..l_count {
        let spec = GapIntegralSpec {
            gap: (endpoints[2 * l - 1], endpoints[2 * l]),
            endpoints: endpoints.to_vec(),
            zeros: w.zeros.clone(),
            p_coeffs: scaled_p.clone(),
            reciprocal_sqrt: false,
        };
        out.push(principal_value_gap_adaptive(&spec)? / hl);
    }
    Ok(out)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton with a central-difference Jacobian. Returns the final
/// endpoints and residual norm.
fn newton(w: &RootWeight, seed: Vec<f64>, opts: &SolverOptions) -> Result<(Vec<f64>, f64)> {
    let n = seed.len();
    let step = opts.fd_step * (w.interval.1 - w.interval.0);
    let mut e = seed;
    let mut r = support_residual(w, &e)?;
    let mut rn = norm(&r);
    for _ in 0..opts.max_newton_iter {
        if rn < opts.newton_tol {
            break;
        }
        let mut jac = vec![0.0; n * n];
        for col in 0..n {
            let mut plus = e.clone();
            let mut minus = e.clone();
            plus[col] += step;
            minus[col] -= step;
            let (rp, rm) = (support_residual(w, &plus), support_residual(w, &minus));
            let deriv: Vec<f64> = match (rp, rm) {
                (Ok(rp), Ok(rm)) => rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * step)).collect(),
                (Ok(rp), Err(_)) => rp.iter().zip(&r).map(|(a, b)| (a - b) / step).collect(),
                (Err(_), Ok(rm)) => r.iter().zip(&rm).map(|(a, b)| (a - b) / step).collect(),
                (Err(err), Err(_)) => return Err(err),
            };
            for (row, d) in deriv.into_iter().enumerate() {
                jac[row * n + col] = d;
            }
        }
        let Some(delta) = solve_dense(n, jac, r.iter().map(|v| -v).collect()) else {
            break;
        };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = e.iter().zip(&delta).map(|(x, d)| x + lambda * d).collect();
            if let Ok(rt) = support_residual(w, &trial) {
                let tn = norm(&rt);
                if tn < rn {
                    e = trial;
                    r = rt;
                    rn = tn;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((e, rn))
}

/// Merges clusters lying between the same pair of consecutive zeros.
fn one_per_gap(w: &RootWeight, clusters: Vec<Cluster>) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for c in clusters {
        let gap = w.zeros.iter().filter(|&&z| z < c.lo).count();
        match out.last_mut() {
            Some(prev) if w.zeros.iter().filter(|&&z| z < prev.lo).count() == gap => {
                prev.hi = c.hi;
                prev.mass += c.mass;
            }
            _ => out.push(c),
        }
    }
    out
}

/// Finds the support of the equilibrium measure of `w`.
///
/// Candidate configurations are tried from the discrete clustering downwards:
/// after a rejected solve the collapsed interval (or, failing that, the one
/// with the least discrete mass) is dropped.
pub fn determine_support(w: &RootWeight, opts: &SolverOptions) -> Result<SupportConfig> {
    if w.num_zeros() < 2 || !w.vanishes_at_ends() {
        return Err(Error::Invalid(
            "support detection needs at least two zeros, including both interval ends".into(),
        ));
    }
    let discrete = discrete_energy_minimize(w, opts.grid_size)?;
    let mut clusters = one_per_gap(w, discrete.clusters(w, opts.mass_threshold));
    let mut last_reason = String::from("discrete minimizer found no charged points");
    while !clusters.is_empty() {
        let seed: Vec<f64> = clusters.iter().flat_map(|c| [c.lo, c.hi]).collect();
        let mut drop: Option<usize> = None;
        match newton(w, seed, opts) {
            Ok((e, rn)) => {
                let collapsed = e.chunks(2).position(|iv| iv[1] - iv[0] < opts.min_width);
                if let Some(l) = collapsed {
                    drop = Some(l);
                    last_reason = format!("interval {l} collapsed");
                } else if rn >= opts.accept_tol {
                    last_reason = format!("Newton residual {rn:e} with {} intervals", clusters.len());
                } else {
                    let s = SupportConfig::new(w, e)?;
                    let m = EquilibriumMeasure::from_support(w, s.clone())?;
                    let min = m.min_density(opts.positivity_points);
                    if min >= opts.positivity_tol {
                        return Ok(s);
                    }
                    last_reason = format!("density reaches {min:e} with {} intervals", clusters.len());
                }
            }
            Err(err) => last_reason = err.to_string(),
        }
        let idx = drop.unwrap_or_else(|| {
            (0..clusters.len())
                .min_by(|&i, &j| clusters[i].mass.total_cmp(&clusters[j].mass))
                .unwrap()
        });
        clusters.remove(idx);
    }
    Err(Error::NoFeasibleSupport(last_reason))
}
