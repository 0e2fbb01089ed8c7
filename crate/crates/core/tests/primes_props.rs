use std::sync::OnceLock;

use capstan::primes::{build_psi, is_prime_trial, PsiTable};
use proptest::prelude::*;

fn table() -> &'static PsiTable {
    static T: OnceLock<PsiTable> = OnceLock::new();
    T.get_or_init(|| build_psi(100_000).unwrap())
}

proptest! {
    #[test]
    fn psi_is_nondecreasing(n in 2u64..100_000) {
        let t = table();
        prop_assert!(t.psi(n) >= t.psi(n - 1));
    }

    #[test]
    fn integral_is_convex(n in 2u64..99_999) {
        let t = table();
        // second difference of I is psi(n) - psi(n - 1) >= 0
        prop_assert!(t.integral(n + 1) - 2.0 * t.integral(n) + t.integral(n - 1) >= -1e-9);
    }

    #[test]
    fn jumps_only_at_prime_powers(n in 2u64..100_000) {
        let t = table();
        let j = t.jump(n);
        if j > 0.0 {
            let p = (j.exp()).round() as u64;
            prop_assert!(is_prime_trial(p));
            let mut q = p;
            while q < n {
                q *= p;
            }
            prop_assert_eq!(q, n);
        } else {
            prop_assert!(!is_prime_trial(n));
        }
    }

    #[test]
    fn sieve_agrees_with_trial_division(n in 2u64..100_000) {
        prop_assert_eq!(table().primes.binary_search(&n).is_ok(), is_prime_trial(n));
    }
}
