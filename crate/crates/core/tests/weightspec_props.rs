use capstan::weightspec::{to_root_form, Factor, FactoredWeight, WeightConfig, DEFAULT_ROOT_TOL};
use proptest::prelude::*;

fn int_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Linear factors `k x - j` with the root `j / k` in [0, 1].
fn linear_factors() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((1i64..=6, 0i64..=6).prop_map(|(k, j)| (k, j.min(k))), 1..=3)
}

/// Weight together with the linear factorization of each of its factors.
fn weight_with_roots() -> impl Strategy<Value = (FactoredWeight, Vec<(Vec<(i64, i64)>, f64)>)> {
    prop::collection::vec((linear_factors(), 0.05f64..3.0), 0..=3).prop_map(|fs| {
        let factors = fs
            .iter()
            .map(|(lin, e)| {
                let q = lin.iter().fold(vec![1], |acc, &(k, j)| int_mul(&acc, &[-j, k]));
                Factor::new(q, *e)
            })
            .collect();
        (FactoredWeight::new((0.0, 1.0), factors).unwrap(), fs)
    })
}

fn factored_weight() -> impl Strategy<Value = FactoredWeight> {
    weight_with_roots().prop_map(|(fw, _)| fw)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponent_sum_is_preserved(fw in factored_weight()) {
        let rw = to_root_form(&fw, DEFAULT_ROOT_TOL).unwrap();
        prop_assert!((rw.total_exponent() - fw.aggregate_exponent()).abs() < 1e-12);
        prop_assert!(rw.zeros.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn pointwise_agreement((fw, lin) in weight_with_roots(), xs in prop::collection::vec(0.0f64..1.0, 100)) {
        let rw = to_root_form(&fw, DEFAULT_ROOT_TOL).unwrap();
        for x in xs {
            if rw.zeros.iter().any(|z| (x - z).abs() < 1e-3) {
                continue;
            }
            // product form avoids the cancellation of the expanded coefficients near multiple roots
            let direct: f64 = lin
                .iter()
                .map(|(fs, e)| fs.iter().map(|&(k, j)| (k as f64 * x - j as f64).abs().powf(*e)).product::<f64>())
                .product();
            let via_roots = rw.log_weight(x).exp();
            prop_assert!((direct - via_roots).abs() <= 1e-10 * direct.abs(), "x = {x}: {direct} vs {via_roots}");
        }
    }

    #[test]
    fn splitting_a_factor_changes_nothing(fw in factored_weight(), pick in 0usize..3) {
        prop_assume!(!fw.factors.is_empty());
        let i = pick % fw.factors.len();
        let mut factors = fw.factors.clone();
        let f = factors.remove(i);
        factors.push(Factor::new(f.coeffs.clone(), f.exponent / 2.0));
        factors.push(Factor::new(f.coeffs, f.exponent / 2.0));
        let split = FactoredWeight::new(fw.interval, factors).unwrap();
        let a = to_root_form(&fw, DEFAULT_ROOT_TOL).unwrap();
        let b = to_root_form(&split, DEFAULT_ROOT_TOL).unwrap();
        prop_assert_eq!(&a.zeros, &b.zeros);
        prop_assert!((a.log_a - b.log_a).abs() < 1e-12);
        for (p, q) in a.exponents.iter().zip(&b.exponents) {
            prop_assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn config_round_trip(fw in factored_weight()) {
        let cfg = WeightConfig::from_factored(&fw);
        let text = cfg.to_json();
        let back = WeightConfig::from_json(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_factored().unwrap(), fw);
    }
}
