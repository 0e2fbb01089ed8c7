//! Polynomial-type weights in their two representations.
//!
//! A [`FactoredWeight`] is a product of powers of integer polynomials,
//! `w(x) = prod_i |Q_i(x)|^{alpha_i}`. A [`RootWeight`] is the same function
//! rewritten over its real zeros, `w(x) = A prod_j |x - z_j|^{p_j}`, which is
//! the form every equilibrium computation works with.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::RatPoly;

/// Default tolerance for merging roots and snapping them onto the interval ends.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

/// One factor `|Q(x)|^exponent`; `coeffs` are ascending by degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor<E = f64> {
    pub coeffs: Vec<i64>,
    pub exponent: E,
}

impl<E> Factor<E> {
    pub fn new(coeffs: Vec<i64>, exponent: E) -> Self {
        Factor { coeffs, exponent }
    }

    /// Degree of the factor polynomial, ignoring trailing zero coefficients.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0).unwrap_or(0)
    }

    pub fn leading_coefficient(&self) -> i64 {
        self.coeffs.iter().rev().copied().find(|&c| c != 0).unwrap_or(0)
    }
}

impl<E: fmt::Display> fmt::Display for Factor<E> {
    /// `|1 - x|^0.5` style, terms in ascending degree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = String::new();
        for (k, &c) in self.coeffs.iter().enumerate().filter(|&(_, &c)| c != 0) {
            let mag = c.unsigned_abs();
            let body = match (k, mag) {
                (0, _) => mag.to_string(),
                (1, 1) => "x".to_string(),
                (1, _) => format!("{mag}x"),
                (_, 1) => format!("x^{k}"),
                _ => format!("{mag}x^{k}"),
            };
            if terms.is_empty() {
                terms = if c < 0 { format!("-{body}") } else { body };
            } else {
                terms += if c < 0 { " - " } else { " + " };
                terms += &body;
            }
        }
        write!(f, "|{terms}|^{}", self.exponent)
    }
}

impl<E: fmt::Display> fmt::Display for FactoredWeight<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            write!(f, "1")?;
        }
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{factor}")?;
        }
        write!(f, " on [{}, {}]", self.interval.0, self.interval.1)
    }
}

/// Weight `prod_i |Q_i(x)|^{alpha_i}` on `[a, b]`.
///
/// The exponent type is `f64` for numerical work and [`BigRational`] for the
/// exact certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredWeight<E = f64> {
    pub interval: (f64, f64),
    pub factors: Vec<Factor<E>>,
}

impl<E> FactoredWeight<E> {
    fn validate_shape(&self) -> Result<()> {
        let (a, b) = self.interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::DegenerateInterval(a, b));
        }
        for (i, f) in self.factors.iter().enumerate() {
            if f.degree() == 0 {
                return Err(Error::Invalid(format!(
                    "factor {i} must be a polynomial of degree at least one"
                )));
            }
        }
        Ok(())
    }
}

impl FactoredWeight<f64> {
    pub fn new(interval: (f64, f64), factors: Vec<Factor<f64>>) -> Result<Self> {
        let w = FactoredWeight { interval, factors };
        w.validate()?;
        Ok(w)
    }

    /// `x^{p1} (1-x)^{p2}` on `[0, 1]`.
    pub fn jacobi(p1: f64, p2: f64) -> Result<Self> {
        Self::new(
            (0.0, 1.0),
            vec![Factor::new(vec![0, 1], p1), Factor::new(vec![1, -1], p2)],
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        for (i, f) in self.factors.iter().enumerate() {
            if !(f.exponent.is_finite() && f.exponent > 0.0) {
                return Err(Error::Invalid(format!(
                    "factor {i} has non-positive exponent {}",
                    f.exponent
                )));
            }
        }
        Ok(())
    }

    /// Aggregate exponent `sum_i alpha_i deg Q_i`.
    pub fn aggregate_exponent(&self) -> f64 {
        self.factors
            .iter()
            .fold(0.0, |acc, f| acc + f.exponent * f.degree() as f64)
    }

    /// Direct evaluation of `prod_i |Q_i(x)|^{alpha_i}`.
    pub fn eval(&self, x: f64) -> f64 {
        self.factors
            .iter()
            .map(|f| crate::poly::eval_int(&f.coeffs, x).abs().powf(f.exponent))
            .product()
    }
}

impl FactoredWeight<BigRational> {
    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        for (i, f) in self.factors.iter().enumerate() {
            if !f.exponent.is_positive() {
                return Err(Error::Invalid(format!("factor {i} has non-positive exponent")));
            }
        }
        Ok(())
    }
}

/// Weight `A prod_j |x - z_j|^{p_j}` on `[a, b]` with `log A` stored directly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootWeight {
    pub interval: (f64, f64),
    pub log_a: f64,
    pub zeros: Vec<f64>,
    pub exponents: Vec<f64>,
}

impl RootWeight {
    pub fn new(interval: (f64, f64), log_a: f64, zeros: Vec<f64>, exponents: Vec<f64>) -> Result<Self> {
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::DegenerateInterval(a, b));
        }
        if !log_a.is_finite() {
            return Err(Error::Invalid("log A must be finite".into()));
        }
        if zeros.len() != exponents.len() {
            return Err(Error::Invalid("zeros and exponents differ in length".into()));
        }
        if zeros.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("zeros must be strictly increasing".into()));
        }
        if zeros.iter().any(|&z| !(a..=b).contains(&z)) {
            return Err(Error::Invalid("zeros must lie in the interval".into()));
        }
        if exponents.iter().any(|&p| !(p.is_finite() && p > 0.0)) {
            return Err(Error::Invalid("exponents must be positive".into()));
        }
        Ok(RootWeight { interval, log_a, zeros, exponents })
    }

    /// `x^{p1} (1-x)^{p2}` on `[0, 1]`.
    pub fn jacobi(p1: f64, p2: f64) -> Result<Self> {
        Self::new((0.0, 1.0), 0.0, vec![0.0, 1.0], vec![p1, p2])
    }

    /// Constant weight `e^{log_a}`.
    pub fn constant(interval: (f64, f64), log_a: f64) -> Result<Self> {
        Self::new(interval, log_a, Vec::new(), Vec::new())
    }

    pub fn num_zeros(&self) -> usize {
        self.zeros.len()
    }

    /// Total exponent `p = sum_j p_j`.
    pub fn total_exponent(&self) -> f64 {
        self.exponents.iter().fold(0.0, |acc, p| acc + p)
    }

    /// True when the outermost zeros sit on the interval ends.
    pub fn vanishes_at_ends(&self) -> bool {
        let (a, b) = self.interval;
        self.zeros.len() >= 2 && self.zeros[0] == a && *self.zeros.last().unwrap() == b
    }

    /// `log w(x)`; `-inf` exactly at the zeros.
    pub fn log_weight(&self, x: f64) -> f64 {
        let mut acc = self.log_a;
        for (&z, &p) in self.zeros.iter().zip(&self.exponents) {
            if x == z {
                return f64::NEG_INFINITY;
            }
            acc += p * (x - z).abs().ln();
        }
        acc
    }

    /// First and second derivatives of `log w` at a point off the zeros.
    pub fn log_weight_derivatives(&self, x: f64) -> (f64, f64) {
        self.zeros
            .iter()
            .zip(&self.exponents)
            .fold((0.0, 0.0), |(d1, d2), (&z, &p)| {
                let u = 1.0 / (x - z);
                (d1 + p * u, d2 - p * u * u)
            })
    }

    /// Same weight translated by `shift` (interval and zeros move together).
    pub fn translated(&self, shift: f64) -> Self {
        RootWeight {
            interval: (self.interval.0 + shift, self.interval.1 + shift),
            log_a: self.log_a,
            zeros: self.zeros.iter().map(|z| z + shift).collect(),
            exponents: self.exponents.clone(),
        }
    }
}

impl fmt::Display for RootWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log_a != 0.0 {
            write!(f, "{:.6}*", self.log_a.exp())?;
        }
        if self.zeros.is_empty() {
            write!(f, "1")?;
        }
        for (k, (z, p)) in self.zeros.iter().zip(&self.exponents).enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "|x-({z})|^{p}")?;
        }
        write!(f, " on [{}, {}]", self.interval.0, self.interval.1)
    }
}

/// Rewrites a factored weight over its real zeros.
///
/// Roots of multiplicity `s` in a factor with exponent `alpha` contribute
/// `s * alpha`; roots closer than `root_tol` are merged, and roots within
/// `root_tol` of an interval end are snapped onto it.
pub fn to_root_form(fw: &FactoredWeight<f64>, root_tol: f64) -> Result<RootWeight> {
    fw.validate()?;
    let (a, b) = fw.interval;
    let mut log_a = 0.0;
    let mut roots: Vec<(f64, f64)> = Vec::new();
    for (i, factor) in fw.factors.iter().enumerate() {
        log_a += factor.exponent * (factor.leading_coefficient() as f64).abs().ln();
        let q = RatPoly::from_ints(&factor.coeffs);
        for (part, mult) in q.square_free_decomposition() {
            let found = part
                .real_roots_square_free(1e-15)
                .ok_or(Error::ComplexRoot { factor: i })?;
            for mut r in found {
                if r < a - root_tol || r > b + root_tol {
                    return Err(Error::RootOutsideInterval { factor: i, root: r, a, b });
                }
                if (r - a).abs() <= root_tol {
                    r = a;
                } else if (r - b).abs() <= root_tol {
                    r = b;
                }
                roots.push((r, mult as f64 * factor.exponent));
            }
        }
    }
    roots.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut zeros: Vec<f64> = Vec::new();
    let mut exponents: Vec<f64> = Vec::new();
    for (r, e) in roots {
        match zeros.last_mut() {
            Some(last) if (r - *last).abs() <= root_tol => {
                if r == a || r == b {
                    *last = r;
                }
                *exponents.last_mut().unwrap() += e;
            }
            _ => {
                zeros.push(r);
                exponents.push(e);
            }
        }
    }
    RootWeight::new(fw.interval, log_a, zeros, exponents)
}

/// JSON weight description: `{"interval":[a,b],"factors":[{"coeffs":[..],"exponent":e}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub interval: [f64; 2],
    #[serde(default)]
    pub factors: Vec<FactorConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    pub coeffs: Vec<i64>,
    pub exponent: ExponentValue,
}

/// An exponent written either as a JSON number or as a string such as `"39/200"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentValue {
    Number(f64),
    Text(String),
}

impl ExponentValue {
    pub fn to_f64(&self) -> Result<f64> {
        match self {
            ExponentValue::Number(v) => Ok(*v),
            ExponentValue::Text(s) => {
                let r = parse_rational(s)?;
                Ok(rational_to_f64(&r))
            }
        }
    }

    /// Exact value. Numbers are read through their shortest decimal rendering,
    /// so `0.195` becomes `39/200` rather than the nearest binary fraction.
    pub fn to_exact(&self) -> Result<BigRational> {
        match self {
            ExponentValue::Number(v) => parse_rational(&format!("{v}")),
            ExponentValue::Text(s) => parse_rational(s),
        }
    }
}

impl WeightConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("weight config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("weight config serializes")
    }

    pub fn from_factored(fw: &FactoredWeight<f64>) -> Self {
        WeightConfig {
            interval: [fw.interval.0, fw.interval.1],
            factors: fw
                .factors
                .iter()
                .map(|f| FactorConfig {
                    coeffs: f.coeffs.clone(),
                    exponent: ExponentValue::Number(f.exponent),
                })
                .collect(),
        }
    }

    pub fn to_factored(&self) -> Result<FactoredWeight<f64>> {
        let factors = self
            .factors
            .iter()
            .map(|f| Ok(Factor::new(f.coeffs.clone(), f.exponent.to_f64()?)))
            .collect::<Result<Vec<_>>>()?;
        FactoredWeight::new((self.interval[0], self.interval[1]), factors)
    }

    pub fn to_exact(&self) -> Result<FactoredWeight<BigRational>> {
        let factors = self
            .factors
            .iter()
            .map(|f| Ok(Factor::new(f.coeffs.clone(), f.exponent.to_exact()?)))
            .collect::<Result<Vec<_>>>()?;
        let w = FactoredWeight { interval: (self.interval[0], self.interval[1]), factors };
        w.validate()?;
        Ok(w)
    }
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.195"` or `"-1.5e-3"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("cannot read {s:?} as a rational number"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
