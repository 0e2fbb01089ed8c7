//! Quadrature for densities with square-root endpoint behaviour.
//!
//! Everything here is built on the cosine substitution `x = c + r cos(theta)`,
//! under which `dx / sqrt((x - a)(b - x))` becomes `d theta`. Integrals of
//! `f / sqrt(...)` then reduce to an equal-weight rule (Gauss-Chebyshev of the
//! first kind), and logarithmic potentials of such densities have a closed form
//! in the Chebyshev coefficients of `f`.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::poly;

/// First node count tried by the adaptive rules.
pub const START_NODES: usize = 64;
/// Node count at which the adaptive rules give up.
pub const MAX_NODES: usize = 16384;
/// Relative change between successive doublings accepted as converged.
pub const ADAPTIVE_TOL: f64 = 1e-12;

fn check_interval(c: f64, d: f64) -> Result<()> {
    if !(c.is_finite() && d.is_finite() && d > c) {
        return Err(Error::DegenerateInterval(c, d));
    }
    Ok(())
}

/// Gauss-Chebyshev nodes `cos((i + 1/2) pi / n)`, in decreasing order.
pub fn chebyshev_nodes(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| ((i as f64 + 0.5) * PI / n as f64).cos())
}

/// `int_c^d f(x) / sqrt((x - c)(d - x)) dx` with an `nodes`-point Gauss-Chebyshev rule.
pub fn integrate_sqrt_singular<F: Fn(f64) -> f64>(f: F, c: f64, d: f64, nodes: usize) -> Result<f64> {
    check_interval(c, d)?;
    if nodes == 0 {
        return Err(Error::Invalid("at least one node is required".into()));
    }
    let (mid, half) = (0.5 * (c + d), 0.5 * (d - c));
    let sum: f64 = chebyshev_nodes(nodes).map(|t| f(mid + half * t)).sum();
    Ok(PI * sum / nodes as f64)
}

/// Node-doubling driver: `rule(n)` returns `(value, scale)` where `scale`
/// bounds the magnitude of the terms summed (used for the stopping test).
pub fn adaptive<R: FnMut(usize) -> Result<(f64, f64)>>(mut rule: R, what: &str) -> Result<f64> {
    let mut n = START_NODES;
    let (mut prev, _) = rule(n)?;
    while n < MAX_NODES {
        n *= 2;
        let (cur, scale) = rule(n)?;
        if (cur - prev).abs() <= ADAPTIVE_TOL * scale.max(cur.abs()).max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNonConvergence(format!(
        "{what}: no convergence with {MAX_NODES} nodes"
    )))
}

/// Adaptive version of [`integrate_sqrt_singular`].
pub fn integrate_sqrt_singular_adaptive<F: Fn(f64) -> f64>(f: F, c: f64, d: f64) -> Result<f64> {
    check_interval(c, d)?;
    let (mid, half) = (0.5 * (c + d), 0.5 * (d - c));
    adaptive(
        |n| {
            let (mut sum, mut abs) = (0.0, 0.0);
            for t in chebyshev_nodes(n) {
                let v = f(mid + half * t);
                sum += v;
                abs += v.abs();
            }
            Ok((PI * sum / n as f64, PI * abs / n as f64))
        },
        "sqrt-singular integral",
    )
}

/// Chebyshev expansion `f(x) = sum_k a_k T_k((x - mid) / half)` of a smooth
/// function on `[lo, hi]`, obtained by interpolation at Gauss-Chebyshev nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevSeries {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl ChebyshevSeries {
    /// Interpolant on `n` Gauss-Chebyshev nodes.
    pub fn interpolate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Result<Self> {
        check_interval(lo, hi)?;
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let nodes: Vec<f64> = chebyshev_nodes(n).collect();
        let values: Vec<f64> = nodes.iter().map(|&t| f(mid + half * t)).collect();
        let mut coeffs = vec![0.0; n];
        for (&t, &v) in nodes.iter().zip(&values) {
            let (mut tkm1, mut tk) = (1.0, t);
            coeffs[0] += v;
            for c in coeffs.iter_mut().skip(1) {
                *c += v * tk;
                let next = 2.0 * t * tk - tkm1;
                tkm1 = tk;
                tk = next;
            }
        }
        let scale = 2.0 / n as f64;
        coeffs[0] /= n as f64;
        for c in coeffs.iter_mut().skip(1) {
            *c *= scale;
        }
        Ok(ChebyshevSeries { lo, hi, coeffs })
    }

    /// Doubles the node count until the top quarter of the coefficients has
    /// decayed to roundoff level. The direct transform accumulates error like
    /// `sqrt(n) eps`, so the threshold grows with the node count.
    pub fn fit<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self> {
        let mut n = START_NODES;
        loop {
            let s = Self::interpolate(&f, lo, hi, n)?;
            let head = s.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let tail = s.coeffs[3 * n / 4..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if !head.is_finite() {
                return Err(Error::QuadratureNonConvergence(
                    "non-finite values in Chebyshev fit".into(),
                ));
            }
            if tail <= 2e-15 * (n as f64).sqrt() * head || head == 0.0 {
                return Ok(s);
            }
            if n >= MAX_NODES {
                return Err(Error::QuadratureNonConvergence(format!(
                    "Chebyshev fit on [{lo}, {hi}] still resolving at {n} nodes"
                )));
            }
            n *= 2;
        }
    }

    fn scaled(&self, x: f64) -> f64 {
        (x - 0.5 * (self.lo + self.hi)) / (0.5 * (self.hi - self.lo))
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let t = self.scaled(x);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0]
    }

    /// `int f(t) / sqrt((t - lo)(hi - t)) dt`.
    pub fn weighted_integral(&self) -> f64 {
        PI * self.coeffs[0]
    }

    /// `int log|x - t| f(t) / sqrt((t - lo)(hi - t)) dt`, exact for the series.
    ///
    /// Inside the interval this uses `log|x - t| = -log 2 - sum 2/k T_k(x) T_k(t)`,
    /// outside it the Joukowski expansion in powers of `1 / Phi(x)`.
    pub fn log_integral(&self, x: f64) -> f64 {
        let half = 0.5 * (self.hi - self.lo);
        let xi = self.scaled(x);
        let a0 = self.coeffs[0];
        let mut acc = PI * a0 * half.ln();
        if xi.abs() <= 1.0 {
            acc -= PI * LN_2 * a0;
            let (mut tkm1, mut tk) = (1.0, xi);
            for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
                acc -= PI / k as f64 * c * tk;
                let next = 2.0 * xi * tk - tkm1;
                tkm1 = tk;
                tk = next;
            }
        } else {
            let phi = xi + xi.signum() * ((xi - 1.0) * (xi + 1.0)).sqrt();
            acc += PI * a0 * (phi.abs() / 2.0).ln();
            let inv = 1.0 / phi;
            let mut pw = inv;
            for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
                acc -= PI / k as f64 * c * pw;
                pw *= inv;
                if pw.abs() < 1e-300 {
                    break;
                }
            }
        }
        acc
    }
}

/// Logarithmic potential `-int log|x - t| d mu(t)` of a measure given on each
/// support interval `[a_l, b_l]` as `h_l(t) / sqrt((t - a_l)(b_l - t)) dt`.
pub fn log_potential_of_density(
    support: &[(f64, f64)],
    smooth_parts: &[&dyn Fn(f64) -> f64],
    x: f64,
    nodes: usize,
) -> Result<f64> {
    if support.len() != smooth_parts.len() {
        return Err(Error::Invalid("one smooth part per support interval is required".into()));
    }
    let mut u = 0.0;
    for (&(lo, hi), h) in support.iter().zip(smooth_parts) {
        u -= ChebyshevSeries::interpolate(h, lo, hi, nodes)?.log_integral(x);
    }
    Ok(u)
}

/// Same as [`log_potential_of_density`] for already-fitted series.
pub fn log_potential(components: &[ChebyshevSeries], x: f64) -> f64 {
    -components.iter().map(|s| s.log_integral(x)).sum::<f64>()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = x;
        xs[n - 1 - i] = -x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[n - 1 - i] = ws[i];
    }
    (xs, ws)
}

/// Principal-value integral over a gap `(c, d)` between support intervals of
///
/// `|R(x)|^{±1/2} P(x) / prod_j (x - z_j)`,
///
/// with `R(x) = prod (x - e_k)` over `endpoints`. Poles are the `zeros` lying
/// strictly inside the gap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapIntegralSpec {
    pub gap: (f64, f64),
    /// Interleaved support endpoints `a_1 < b_1 < ... < a_L < b_L`.
    pub endpoints: Vec<f64>,
    /// Roots of the denominator.
    pub zeros: Vec<f64>,
    /// Ascending coefficients of `P`.
    pub p_coeffs: Vec<f64>,
    /// Use `1 / sqrt|R|` instead of `sqrt|R|`.
    pub reciprocal_sqrt: bool,
}

/// How the square-root factor behaves at the gap ends.
enum GapKind {
    /// Both ends are roots of `R`: integrate against the Chebyshev weight.
    Bounded,
    /// Neither end is a root of `R`: plain Gauss-Legendre on a smooth remainder.
    Open,
}

impl GapIntegralSpec {
    fn kind(&self) -> Result<GapKind> {
        let (c, d) = self.gap;
        check_interval(c, d)?;
        let at_c = self.endpoints.contains(&c);
        let at_d = self.endpoints.contains(&d);
        match (at_c, at_d) {
            (true, true) => Ok(GapKind::Bounded),
            (false, false) if !self.reciprocal_sqrt => Ok(GapKind::Open),
            _ => Err(Error::Invalid(
                "gap ends must both or neither be support endpoints".into(),
            )),
        }
    }

    fn poles(&self) -> Result<Vec<usize>> {
        let (c, d) = self.gap;
        let mut out = Vec::new();
        for (j, &z) in self.zeros.iter().enumerate() {
            if (z - c).abs() <= 1e-12 || (z - d).abs() <= 1e-12 {
                return Err(Error::PoleOnBoundary(z));
            }
            if z > c && z < d {
                out.push(j);
            }
        }
        Ok(out)
    }

    /// `sqrt|R(x)|` (or its reciprocal) with the factors at the gap ends removed
    /// when `strip_gap_ends` is set.
    fn root_part(&self, x: f64, strip_gap_ends: bool) -> f64 {
        let (c, d) = self.gap;
        let prod: f64 = self
            .endpoints
            .iter()
            .filter(|&&e| !(strip_gap_ends && (e == c || e == d)))
            .map(|&e| (x - e).abs())
            .product();
        if self.reciprocal_sqrt {
            1.0 / prod.sqrt()
        } else {
            prod.sqrt()
        }
    }

    fn rational_part(&self, x: f64) -> f64 {
        poly::eval(&self.p_coeffs, x) / self.zeros.iter().map(|&z| x - z).product::<f64>()
    }

    fn residue_of_rational(&self, j: usize) -> f64 {
        let z = self.zeros[j];
        let denom: f64 = self
            .zeros
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != j)
            .map(|(_, &zm)| z - zm)
            .product();
        poly::eval(&self.p_coeffs, z) / denom
    }
}

/// Smooth remainder after subtracting simple poles, with an interpolated value
/// for points so close to a pole that the subtraction would lose digits.
fn regularized<F: Fn(f64) -> f64>(g: &F, poles: &[(f64, f64)], x: f64, guard: f64) -> f64 {
    let remainder = |t: f64| g(t) - poles.iter().map(|&(z, res)| res / (t - z)).sum::<f64>();
    match poles.iter().find(|&&(z, _)| (x - z).abs() < guard) {
        None => remainder(x),
        Some(&(z, _)) => {
            // cubic through z - 2h, z - h, z + h, z + 2h
            let h = guard;
            let ts = [z - 2.0 * h, z - h, z + h, z + 2.0 * h];
            let vs = ts.map(remainder);
            let mut acc = 0.0;
            for i in 0..4 {
                let mut l = 1.0;
                for k in 0..4 {
                    if k != i {
                        l *= (x - ts[k]) / (ts[i] - ts[k]);
                    }
                }
                acc += vs[i] * l;
            }
            acc
        }
    }
}

/// Principal value of the gap integral with a fixed node count.
///
/// Simple poles are removed analytically: against the Chebyshev weight the
/// principal value of `1 / ((x - z) sqrt((x - c)(d - x)))` vanishes, and for an
/// open gap the subtracted pole contributes `res * log|(d - z) / (c - z)|`.
pub fn principal_value_gap(spec: &GapIntegralSpec, nodes: usize) -> Result<f64> {
    pv_rule(spec, nodes).map(|(v, _)| v)
}

/// Node-doubling version of [`principal_value_gap`].
pub fn principal_value_gap_adaptive(spec: &GapIntegralSpec) -> Result<f64> {
    adaptive(|n| pv_rule(spec, n), "principal-value gap integral")
}

fn pv_rule(spec: &GapIntegralSpec, nodes: usize) -> Result<(f64, f64)> {
    let kind = spec.kind()?;
    let pole_idx = spec.poles()?;
    let (c, d) = spec.gap;
    let (mid, half) = (0.5 * (c + d), 0.5 * (d - c));
    let guard = 1e-4 * (d - c);
    match kind {
        GapKind::Bounded => {
            // integrand = F(x) / sqrt((x - c)(d - x)) with F smooth apart from the poles
            let gap_factor = |x: f64| {
                let q = (x - c) * (d - x);
                if spec.reciprocal_sqrt {
                    1.0
                } else {
                    q
                }
            };
            let f = |x: f64| gap_factor(x) * spec.root_part(x, true) * spec.rational_part(x);
            let poles: Vec<(f64, f64)> = pole_idx
                .iter()
                .map(|&j| {
                    let z = spec.zeros[j];
                    (z, gap_factor(z) * spec.root_part(z, true) * spec.residue_of_rational(j))
                })
                .collect();
            let (mut sum, mut abs) = (0.0, 0.0);
            for t in chebyshev_nodes(nodes) {
                let v = regularized(&f, &poles, mid + half * t, guard);
                sum += v;
                abs += v.abs();
            }
            let w = PI / nodes as f64;
            Ok((w * sum, w * abs))
        }
        GapKind::Open => {
            let g = |x: f64| spec.root_part(x, false) * spec.rational_part(x);
            let poles: Vec<(f64, f64)> = pole_idx
                .iter()
                .map(|&j| {
                    let z = spec.zeros[j];
                    (z, spec.root_part(z, false) * spec.residue_of_rational(j))
                })
                .collect();
            let (xs, ws) = gauss_legendre(nodes);
            let (mut sum, mut abs) = (0.0, 0.0);
            for (&t, &w) in xs.iter().zip(&ws) {
                let v = w * half * regularized(&g, &poles, mid + half * t, guard);
                sum += v;
                abs += v.abs();
            }
            for &(z, res) in &poles {
                sum += res * ((d - z) / (c - z)).abs().ln();
            }
            Ok((sum, abs))
        }
    }
}
