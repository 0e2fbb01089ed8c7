//! Chebyshev's `psi(n) = sum_{p^m <= n} log p = log lcm(1, ..., n)` and its
//! integral `I(n) = int_1^n psi(t) dt`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PsiTable {
    pub limit: u64,
    pub primes: Vec<u64>,
    /// `psi[n]` for `n = 0..=limit`.
    psi: Vec<f64>,
    /// `integral[n] = I(n)` for `n = 0..=limit` (`I(0) = I(1) = 0`).
    integral: Vec<f64>,
}

impl PsiTable {
    pub fn psi(&self, n: u64) -> f64 {
        self.psi[n as usize]
    }

    /// `I(n) = sum_{j=1}^{n-1} psi(j)`, exact for a step function constant on `[j, j+1)`.
    pub fn integral(&self, n: u64) -> f64 {
        self.integral[n as usize]
    }

    /// `I(x) / (x^2 / 2)`.
    pub fn ratio(&self, x: u64) -> f64 {
        let xf = x as f64;
        self.integral(x) / (0.5 * xf * xf)
    }

    /// `psi(n) - psi(n - 1)`: `log p` when `n = p^m`, else zero.
    pub fn jump(&self, n: u64) -> f64 {
        self.psi[n as usize] - self.psi[n as usize - 1]
    }
}

/// Sieve of Eratosthenes up to `limit`, with `psi` and `I` accumulated along.
pub fn build_psi(limit: u64) -> Result<PsiTable> {
    if limit < 2 {
        return Err(Error::LimitTooSmall(limit));
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut jumps = vec![0.0f64; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        primes.push(p as u64);
        let mut m = p * p;
        while m <= n {
            composite[m] = true;
            m += p;
        }
        let lp = (p as f64).ln();
        let mut q = p;
        loop {
            jumps[q] = lp;
            match q.checked_mul(p) {
                Some(next) if next <= n => q = next,
                _ => break,
            }
        }
    }
    let mut psi = vec![0.0; n + 1];
    let mut integral = vec![0.0; n + 1];
    for k in 2..=n {
        psi[k] = psi[k - 1] + jumps[k];
        integral[k] = integral[k - 1] + psi[k - 1];
    }
    Ok(PsiTable { limit, primes, psi, integral })
}

/// `lcm(1, ..., n)` in exact arithmetic.
pub fn lcm_up_to(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc.lcm(&BigUint::from(k)))
}

/// Natural logarithm of a positive big integer.
pub fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    let shift = bits.saturating_sub(62);
    let top = (v >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `|psi(n) - log lcm(1..n)| < 1e-9 (1 + psi(n))` with the lcm computed exactly.
pub fn verify_psi_lcm(table: &PsiTable, n: u64) -> bool {
    if n > table.limit {
        return false;
    }
    let psi = if n == 0 { 0.0 } else { table.psi(n) };
    (psi - ln_biguint(&lcm_up_to(n))).abs() < 1e-9 * (1.0 + psi)
}

/// Checks every `n <= max_n` against one running exact lcm (cheaper than
/// calling [`verify_psi_lcm`] per `n`). Returns the first failing `n`.
pub fn verify_psi_lcm_range(table: &PsiTable, max_n: u64) -> Option<u64> {
    let mut lcm = BigUint::one();
    for n in 1..=max_n.min(table.limit) {
        lcm = lcm.lcm(&BigUint::from(n));
        let psi = table.psi(n);
        if !((psi - ln_biguint(&lcm)).abs() < 1e-9 * (1.0 + psi)) {
            return Some(n);
        }
    }
    None
}

/// Primality by trial division, kept independent of the sieve.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioReport {
    pub x_min: u64,
    pub x_max: u64,
    /// `min I(x) / (x^2 / 2)` over integers in `[x_min, x_max]`.
    pub min_ratio: f64,
    pub argmin: u64,
    pub ratio_at_limit: f64,
}

/// Worst ratio `I(x) / (x^2 / 2)` over `x in [x_min, limit]`.
pub fn empirical_bound_check(table: &PsiTable, x_min: u64) -> Result<RatioReport> {
    if x_min < 2 || x_min > table.limit {
        return Err(Error::Invalid(format!(
            "x_min = {x_min} must lie in [2, {}]",
            table.limit
        )));
    }
    let (mut min_ratio, mut argmin) = (f64::INFINITY, x_min);
    for x in x_min..=table.limit {
        let r = table.ratio(x);
        if r < min_ratio {
            min_ratio = r;
            argmin = x;
        }
    }
    Ok(RatioReport {
        x_min,
        x_max: table.limit,
        min_ratio,
        argmin,
        ratio_at_limit: table.ratio(table.limit),
    })
}

/// CSV `x,psi,I,ratio` for `x = 1, 1 + stride, ...` and always the limit.
pub fn psi_csv(table: &PsiTable, stride: u64) -> String {
    let stride = stride.max(1);
    let mut out = String::from("x,psi,I,ratio\n");
    let mut x = 1;
    loop {
        let _ = writeln!(out, "{x},{},{},{}", table.psi(x), table.integral(x), table.ratio(x));
        if x == table.limit {
            break;
        }
        x = (x + stride).min(table.limit);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let t = build_psi(100).unwrap();
        assert_eq!(t.psi(1), 0.0);
        assert!((t.psi(10) - 2520f64.ln()).abs() < 1e-12);
        assert!((t.psi(10) - 7.832014).abs() < 1e-6);
        assert!((t.integral(3) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(t.primes[..5], [2, 3, 5, 7, 11]);
        assert!(build_psi(1).is_err());
    }

    #[test]
    fn ratio_at_ten_by_hand() {
        let t = build_psi(10).unwrap();
        // psi(1..9): 0, l2, l2+l3, 2l2+l3, 2l2+l3+l5, same, +l7, 3l2+l3+l5+l7, 3l2+2l3+l5+l7
        let (l2, l3, l5, l7) = (2f64.ln(), 3f64.ln(), 5f64.ln(), 7f64.ln());
        let steps = [
            0.0,
            l2,
            l2 + l3,
            2.0 * l2 + l3,
            2.0 * l2 + l3 + l5,
            2.0 * l2 + l3 + l5,
            2.0 * l2 + l3 + l5 + l7,
            3.0 * l2 + l3 + l5 + l7,
            3.0 * l2 + 2.0 * l3 + l5 + l7,
        ];
        let i10: f64 = steps.iter().sum();
        assert!((t.integral(10) - i10).abs() < 1e-12);
        assert!((t.ratio(10) - i10 / 50.0).abs() < 1e-14);
    }

    #[test]
    fn lcm_identity() {
        assert_eq!(lcm_up_to(10), BigUint::from(2520u32));
        assert_eq!(lcm_up_to(1), BigUint::one());
        let t = build_psi(200).unwrap();
        assert!(verify_psi_lcm(&t, 1));
        assert!(verify_psi_lcm(&t, 10));
        assert!(verify_psi_lcm(&t, 100));
        assert_eq!(verify_psi_lcm_range(&t, 200), None);
    }

    #[test]
    fn jumps_match_trial_division() {
        let t = build_psi(2000).unwrap();
        for n in 2..=2000u64 {
            let expected = (2..=n)
                .filter(|&p| is_prime_trial(p))
                .find_map(|p| {
                    let mut q = p;
                    while q < n {
                        q *= p;
                    }
                    (q == n).then(|| (p as f64).ln())
                })
                .unwrap_or(0.0);
            assert!((t.jump(n) - expected).abs() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn log_of_big_integers() {
        let v = BigUint::from(10u32).pow(300);
        assert!((ln_biguint(&v) - 300.0 * 10f64.ln()).abs() < 1e-10);
        assert_eq!(ln_biguint(&BigUint::one()), 0.0);
    }

    #[test]
    fn csv_layout() {
        let t = build_psi(10).unwrap();
        let csv = psi_csv(&t, 4);
        let xs: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(xs, ["1", "5", "9", "10"]);
        assert!(csv.starts_with("x,psi,I,ratio\n"));
    }
}
