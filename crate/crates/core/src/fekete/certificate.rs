//! Exact integer certificate behind the prime bound at small `n`.
//!
//! The polynomial
//!
//! `D(x_1..x_n) = prod_j prod_i Q_i(x_j)^{2 ceil(alpha_i (n-1))} prod_{i<j} (x_i - x_j)^2`
//!
//! has integer coefficients, so its integral over `[0,1]^n` is a positive
//! rational whose denominator divides `prod_{l=n+N}^{2n-1+N} lcm(1..l)`.
//! The product of the two is therefore a positive integer, and taking logs
//! gives `sum_l psi(l) >= -log int D`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::primes::{build_psi, lcm_up_to, ln_biguint};
use crate::weightspec::FactoredWeight;

/// Default cap on the number of monomials in the expansion.
pub const DEFAULT_TERM_BUDGET: usize = 1_000_000;

/// Multivariate polynomial with big-integer coefficients keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub vars: usize,
    pub terms: BTreeMap<Vec<u32>, BigInt>,
}

impl Expansion {
    pub fn one(vars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; vars], BigInt::one());
        Expansion { vars, terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_work(&self, factor_terms: usize, budget: usize) -> Result<()> {
        if self.len().saturating_mul(factor_terms) > budget.saturating_mul(64) {
            return Err(Error::BudgetExceeded(budget));
        }
        Ok(())
    }

    fn finish(&mut self, next: BTreeMap<Vec<u32>, BigInt>, budget: usize) -> Result<()> {
        self.terms = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if self.len() > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        Ok(())
    }

    /// Multiplies by a univariate polynomial (ascending coefficients) in `var`.
    pub fn mul_univariate(&mut self, var: usize, coeffs: &[BigInt], budget: usize) -> Result<()> {
        let nonzero: Vec<(u32, &BigInt)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as u32, c))
            .collect();
        self.check_work(nonzero.len(), budget)?;
        let mut next: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (exps, c) in &self.terms {
            for &(k, ck) in &nonzero {
                let mut e = exps.clone();
                e[var] += k;
                *next.entry(e).or_insert_with(BigInt::zero) += c * ck;
            }
        }
        self.finish(next, budget)
    }

    /// Multiplies by `(x_i - x_j)^2 = x_i^2 - 2 x_i x_j + x_j^2`.
    pub fn mul_difference_squared(&mut self, i: usize, j: usize, budget: usize) -> Result<()> {
        self.check_work(3, budget)?;
        let two = BigInt::from(2);
        let mut next: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (exps, c) in &self.terms {
            let mut e = exps.clone();
            e[i] += 2;
            *next.entry(e).or_insert_with(BigInt::zero) += c;
            let mut e = exps.clone();
            e[i] += 1;
            e[j] += 1;
            *next.entry(e).or_insert_with(BigInt::zero) -= c * &two;
            let mut e = exps.clone();
            e[j] += 2;
            *next.entry(e).or_insert_with(BigInt::zero) += c;
        }
        self.finish(next, budget)
    }

    /// The same polynomial with variables `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                e.swap(i, j);
                (e, c.clone())
            })
            .collect();
        Expansion { vars: self.vars, terms }
    }

    /// Exact integral over the unit cube, `sum_a a / prod_j (i_j + 1)`.
    pub fn integrate_unit_cube(&self) -> BigRational {
        let max_exp = self.terms.keys().flatten().copied().max().unwrap_or(0) as u64;
        // every prod (i_j + 1) divides lcm(1..max+1)^vars
        let common: BigInt = BigInt::from_biguint(Sign::Plus, lcm_up_to(max_exp + 1)).pow(self.vars as u32);
        let mut numer = BigInt::zero();
        for (exps, c) in &self.terms {
            let denom: BigInt = exps.iter().map(|&e| BigInt::from(e + 1)).product();
            numer += c * (&common / denom);
        }
        BigRational::new(numer, common)
    }

    /// Evaluates at a point in floating point (for tests against quadrature).
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c.to_f64().unwrap_or(f64::NAN)
                    * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>()
            })
            .sum()
    }

    /// Whether every term, with exponents sorted increasingly, satisfies
    /// `i_j <= n + j - 2 + extra` (`j` counted from one).
    pub fn sorted_exponents_bounded(&self, extra: u64) -> bool {
        let n = self.vars as u64;
        self.terms.keys().all(|e| {
            let mut s = e.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(j, &ij)| ij as u64 <= n + j as u64 - 1 + extra)
        })
    }
}

/// Record of an exact certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct GSCertificate {
    pub n: usize,
    pub weight: String,
    /// `ceil(alpha_i (n - 1))` per factor.
    pub ceilings: Vec<u64>,
    /// `N = 2 sum_i m_i ceil(alpha_i (n - 1))`.
    pub weight_degree: u64,
    pub terms: usize,
    pub integral: BigRational,
    pub lcm_product: BigUint,
    pub certified_integer: BigUint,
    /// `-log int D`.
    pub psi_sum_lower_bound: f64,
    /// `sum_{l=n+N}^{2n-1+N} psi(l)` from the sieve.
    pub psi_sum: f64,
    pub exponent_bound_holds: bool,
}

impl GSCertificate {
    /// Range `n + N ..= 2n - 1 + N` of the lcm product.
    pub fn lcm_range(&self) -> (u64, u64) {
        let n = self.n as u64;
        (n + self.weight_degree, 2 * n - 1 + self.weight_degree)
    }
}

/// Integer polynomial power with big coefficients.
fn int_poly_pow(coeffs: &[i64], e: u64) -> Vec<BigInt> {
    let base: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
    let mut out = vec![BigInt::one()];
    for _ in 0..e {
        let mut next = vec![BigInt::zero(); out.len() + base.len() - 1];
        for (i, a) in out.iter().enumerate() {
            for (j, b) in base.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        out = next;
    }
    out
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn ln_rational(r: &BigRational) -> f64 {
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

/// Expands the modified weighted discriminant for `n` points.
pub fn weighted_discriminant(
    fw: &FactoredWeight<BigRational>,
    n: usize,
    budget: usize,
) -> Result<(Expansion, Vec<u64>)> {
    fw.validate()?;
    let nm1 = BigRational::from_integer(BigInt::from(n as u64 - 1));
    let ceilings: Vec<u64> = fw
        .factors
        .iter()
        .map(|f| (&f.exponent * &nm1).ceil().to_integer().to_u64().unwrap_or(u64::MAX))
        .collect();
    let mut univariate = vec![BigInt::one()];
    for (f, &c) in fw.factors.iter().zip(&ceilings) {
        univariate = poly_mul(&univariate, &int_poly_pow(&f.coeffs, 2 * c));
    }
    let mut d = Expansion::one(n);
    for var in 0..n {
        d.mul_univariate(var, &univariate, budget)?;
    }
    for i in 0..n {
        for j in i + 1..n {
            d.mul_difference_squared(i, j, budget)?;
        }
    }
    Ok((d, ceilings))
}

/// Builds and checks the certificate for `n` points (`2 <= n <= 4`).
pub fn exact_gs_certificate(fw: &FactoredWeight<BigRational>, n: usize) -> Result<GSCertificate> {
    exact_gs_certificate_with_budget(fw, n, DEFAULT_TERM_BUDGET)
}

pub fn exact_gs_certificate_with_budget(
    fw: &FactoredWeight<BigRational>,
    n: usize,
    budget: usize,
) -> Result<GSCertificate> {
    if !(2..=4).contains(&n) {
        return Err(Error::Invalid(format!("certificates are supported for n in 2..=4, got {n}")));
    }
    if fw.interval != (0.0, 1.0) {
        return Err(Error::Invalid("certificates need a weight on [0, 1]".into()));
    }
    let (d, ceilings) = weighted_discriminant(fw, n, budget)?;
    let weight_degree: u64 = 2 * fw
        .factors
        .iter()
        .zip(&ceilings)
        .map(|(f, &c)| f.degree() as u64 * c)
        .sum::<u64>();
    let exponent_bound_holds = d.sorted_exponents_bounded(weight_degree);
    if !exponent_bound_holds {
        return Err(Error::CertificateMismatch("an exponent exceeds its degree bound".into()));
    }
    let integral = d.integrate_unit_cube();
    if !integral.is_positive() {
        return Err(Error::NonIntegerCertificate(format!("integral {integral} is not positive")));
    }
    let nn = n as u64;
    let (lo, hi) = (nn + weight_degree, 2 * nn - 1 + weight_degree);
    let mut lcm_product = BigUint::one();
    let mut running = lcm_up_to(lo - 1);
    for l in lo..=hi {
        running = running.lcm(&BigUint::from(l));
        lcm_product *= &running;
    }
    let scaled = BigRational::from_integer(BigInt::from_biguint(Sign::Plus, lcm_product.clone())) * &integral;
    if !scaled.is_integer() {
        return Err(Error::NonIntegerCertificate(format!("lcm product times integral is {scaled}")));
    }
    let certified_integer = scaled.to_integer().to_biguint().unwrap_or_default();
    if certified_integer.is_zero() {
        return Err(Error::NonIntegerCertificate("product is zero".into()));
    }
    let psi_sum_lower_bound = -ln_rational(&integral);
    let table = build_psi(hi.max(2))?;
    let psi_sum: f64 = (lo..=hi).map(|l| table.psi(l)).sum();
    if !(psi_sum_lower_bound <= psi_sum + 1e-9) {
        return Err(Error::CertificateMismatch(format!(
            "-log integral = {psi_sum_lower_bound} exceeds the psi sum {psi_sum}"
        )));
    }
    Ok(GSCertificate {
        n,
        weight: fw.to_string(),
        ceilings,
        weight_degree,
        terms: d.len(),
        integral,
        lcm_product,
        certified_integer,
        psi_sum_lower_bound,
        psi_sum,
        exponent_bound_holds,
    })
}
