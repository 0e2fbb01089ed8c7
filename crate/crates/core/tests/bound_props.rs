use capstan::gsbound::{bound_coefficient, bound_from_capacity, BoundObjective};
use capstan::weightspec::{Factor, FactoredWeight};
use proptest::prelude::*;

const POOL: [&[i64]; 4] = [&[0, 1], &[1, -1], &[-1, 2], &[1, -6, 6]];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn factor_order_is_irrelevant(
        exps in prop::collection::vec(0.05f64..1.5, 4),
        perm in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let polys: Vec<Vec<i64>> = POOL.iter().map(|q| q.to_vec()).collect();
        let b0 = BoundObjective::new(polys.clone()).value(&exps);
        let permuted_polys: Vec<Vec<i64>> = perm.iter().map(|&i| polys[i].clone()).collect();
        let permuted_exps: Vec<f64> = perm.iter().map(|&i| exps[i]).collect();
        let b1 = BoundObjective::new(permuted_polys).value(&permuted_exps);
        prop_assert!(b0.is_finite());
        prop_assert!((b0 - b1).abs() < 1e-10, "{b0} vs {b1}");
    }

    #[test]
    fn bound_matches_capacity_formula(p1 in 0.05f64..2.0, p2 in 0.05f64..2.0) {
        let fw = FactoredWeight::new((0.0, 1.0), vec![Factor::new(vec![0, 1], p1), Factor::new(vec![1, -1], p2)]).unwrap();
        let r = bound_coefficient(&fw).unwrap();
        let alpha = p1 + p2;
        prop_assert!((r.b - bound_from_capacity(r.c_w, alpha)).abs() < 1e-14);
        prop_assert!((r.b + 2.0 * r.c_w.ln() / (4.0 * alpha + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_exponent_drops_the_factor(p1 in 0.05f64..2.0, p2 in 0.05f64..2.0) {
        let mut full = BoundObjective::new(vec![vec![0, 1], vec![1, -1], vec![-1, 2]]);
        let mut reduced = BoundObjective::new(vec![vec![0, 1], vec![1, -1]]);
        let b0 = full.value(&[p1, p2, 0.0]);
        let b1 = reduced.value(&[p1, p2]);
        prop_assert_eq!(b0, b1);
    }
}
