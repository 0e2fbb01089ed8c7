//! Dense univariate polynomials: exact rational arithmetic for root isolation,
//! plus a handful of `f64` helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Polynomial with rational coefficients, ascending by degree, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RatPoly { coeffs: vec![BigRational::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => {
                let lc = lc.clone();
                Self::new(self.coeffs.iter().map(|c| c / &lc).collect())
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[k] -= c;
        }
        Self::new(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] / &lc;
            if !q.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &q * d;
                }
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &BigRational) -> i32 {
        sign(&self.eval(x))
    }

    /// Sign as x -> +inf (`positive = true`) or x -> -inf.
    pub fn sign_at_infinity(&self, positive: bool) -> i32 {
        match (self.leading(), self.degree()) {
            (None, _) => 0,
            (Some(lc), Some(d)) => {
                let s = sign(lc);
                if positive || d % 2 == 0 {
                    s
                } else {
                    -s
                }
            }
            _ => unreachable!(),
        }
    }

    /// Yun's square-free decomposition: returns `(f_k, k)` with `self = c * prod f_k^k`,
    /// each `f_k` monic, square-free and of positive degree.
    pub fn square_free_decomposition(&self) -> Vec<(RatPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut k = 1;
        while b.degree().unwrap_or(0) > 0 {
            a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), k));
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            k += 1;
        }
        out
    }

    fn sturm_sequence(&self) -> Vec<RatPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(Self::new(r.coeffs.into_iter().map(|c| -c).collect()));
        }
        seq
    }

    /// Isolates and refines all distinct real roots of a square-free polynomial.
    ///
    /// Returns `None` if the polynomial has nonreal roots. Roots are refined by
    /// exact bisection until the bracket is narrower than `rel_width * max(1, |x|)`.
    pub fn real_roots_square_free(&self, rel_width: f64) -> Option<Vec<f64>> {
        let deg = self.degree()?;
        if deg == 0 {
            return Some(Vec::new());
        }
        let seq = self.sturm_sequence();
        let changes = |signs: Vec<i32>| -> usize {
            let nz: Vec<i32> = signs.into_iter().filter(|&s| s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let var_at = |x: &BigRational| changes(seq.iter().map(|p| p.sign_at(x)).collect());
        let total = changes(seq.iter().map(|p| p.sign_at_infinity(false)).collect())
            - changes(seq.iter().map(|p| p.sign_at_infinity(true)).collect());
        if total < deg {
            return None;
        }

        // Cauchy bound, widened to a power of two so bisection stays dyadic.
        let lc = self.leading().unwrap().abs();
        let mut bound = BigRational::one();
        for c in &self.coeffs[..deg] {
            let r = c.abs() / &lc;
            if r > bound {
                bound = r;
            }
        }
        let mut m = BigRational::from_integer(BigInt::from(2));
        let bound = bound + BigRational::one();
        while m <= bound {
            m = m * BigRational::from_integer(BigInt::from(2));
        }

        let two = BigRational::from_integer(BigInt::from(2));
        let mut roots = Vec::new();
        let mut isolated: Vec<(BigRational, BigRational)> = Vec::new();
        let mut stack = vec![(-m.clone(), m.clone())];
        while let Some((lo, hi)) = stack.pop() {
            let count = var_at(&lo) - var_at(&hi);
            if count == 0 {
                continue;
            }
            if count == 1 {
                isolated.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / &two;
            if self.sign_at(&mid) == 0 {
                roots.push(mid.to_f64().unwrap());
                let mut delta = (&hi - &lo) / BigRational::from_integer(BigInt::from(4));
                loop {
                    let l = &mid - &delta;
                    let r = &mid + &delta;
                    if self.sign_at(&l) != 0 && self.sign_at(&r) != 0 && var_at(&l) - var_at(&r) == 1
                    {
                        stack.push((lo.clone(), l));
                        stack.push((r, hi.clone()));
                        break;
                    }
                    delta = delta / &two;
                }
            } else {
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }

        for (mut lo, mut hi) in isolated {
            let mut s_lo = self.sign_at(&lo);
            loop {
                let lo_f = lo.to_f64().unwrap();
                let hi_f = hi.to_f64().unwrap();
                if hi_f - lo_f <= rel_width * lo_f.abs().max(hi_f.abs()).max(1.0) {
                    roots.push(0.5 * (lo_f + hi_f));
                    break;
                }
                let mid = (&lo + &hi) / &two;
                let s = self.sign_at(&mid);
                if s == 0 {
                    roots.push(mid.to_f64().unwrap());
                    break;
                }
                if s_lo == 0 {
                    s_lo = self.sign_at(&lo);
                }
                if s == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Some(roots)
    }
}

fn sign(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Horner evaluation of an ascending coefficient list.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Horner evaluation of an integer coefficient list in `f64`.
pub fn eval_int(coeffs: &[i64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
}

/// Ascending coefficients of `prod_k (x - roots[k])`.
pub fn from_roots(roots: &[f64]) -> Vec<f64> {
    let mut out = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; out.len() + 1];
        for (k, &c) in out.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= r * c;
        }
        out = next;
    }
    out
}
