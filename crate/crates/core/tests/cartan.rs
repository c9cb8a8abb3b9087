use proptest::prelude::*;
use toral_core::cartan::{cartan_dim_bound, cartan_entropy, check_theorem14_hypotheses, CartanElement, RootSystemSpec, SimpleFactor};

/// `Σ_{i<j} (s_i − s_j)` for `s` sorted descending, as `Σ_k s_k (n − 2k + 1)`.
fn sorted_entropy(t: &[f64]) -> f64 {
    let mut s = t.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let n = s.len() as f64;
    s.iter().enumerate().map(|(k, v)| v * (n - 2.0 * (k as f64 + 1.0) + 1.0)).sum()
}

/// Trace-zero vectors with half-integer entries (exact in binary).
fn element(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-8i32..=8, n - 1).prop_map(|v| {
        let last = -v.iter().sum::<i32>();
        v.into_iter().chain([last]).map(|x| x as f64 / 2.0).collect()
    })
}

fn system() -> impl Strategy<Value = (Vec<SimpleFactor>, Vec<Vec<f64>>)> {
    prop::collection::vec((2usize..=5, 1usize..=2), 1..=3).prop_flat_map(|fs| {
        let factors: Vec<SimpleFactor> = fs.iter().map(|&(n, m)| SimpleFactor { n, root_multiplicity: m }).collect();
        let elems: Vec<_> = fs.iter().map(|&(n, _)| element(n)).collect();
        (Just(factors), elems)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entropy_matches_sorted_formula((factors, t) in system()) {
        let spec = RootSystemSpec::new(factors.clone()).unwrap();
        let e = cartan_entropy(&spec, &CartanElement::new(t.clone())).unwrap();
        let want: f64 = factors.iter().zip(&t).map(|(f, v)| f.root_multiplicity as f64 * sorted_entropy(v)).sum();
        prop_assert!((e.entropy - want).abs() < 1e-9, "{} vs {want}", e.entropy);
    }

    #[test]
    fn dimensions_sum_to_the_algebra((factors, t) in system()) {
        let spec = RootSystemSpec::new(factors).unwrap();
        let e = cartan_entropy(&spec, &CartanElement::new(t)).unwrap();
        prop_assert_eq!(e.dim_h_plus + e.dim_h_minus + e.dim_h_zero, spec.dim());
    }

    #[test]
    fn negation_swaps_expanding_and_contracting((factors, t) in system()) {
        let spec = RootSystemSpec::new(factors).unwrap();
        let a = CartanElement::new(t);
        let e = cartan_entropy(&spec, &a).unwrap();
        let f = cartan_entropy(&spec, &a.neg()).unwrap();
        prop_assert!((e.entropy - f.entropy).abs() < 1e-9);
        prop_assert_eq!(e.dim_h_plus, f.dim_h_minus);
        prop_assert_eq!(e.dim_h_minus, f.dim_h_plus);
        prop_assert_eq!(e.dim_h_zero, f.dim_h_zero);
    }

    #[test]
    fn entropy_is_positively_homogeneous((factors, t) in system(), c in 1u32..8) {
        let spec = RootSystemSpec::new(factors).unwrap();
        let c = c as f64 / 4.0;
        let scaled: Vec<Vec<f64>> = t.iter().map(|v| v.iter().map(|x| c * x).collect()).collect();
        let e = cartan_entropy(&spec, &CartanElement::new(t)).unwrap();
        let s = cartan_entropy(&spec, &CartanElement::new(scaled)).unwrap();
        prop_assert!((s.entropy - c * e.entropy).abs() < 1e-9 * (1.0 + s.entropy));
        prop_assert_eq!(e.dim_h_plus, s.dim_h_plus);
    }

    #[test]
    fn entropy_adds_over_factors((factors, t) in system()) {
        let spec = RootSystemSpec::new(factors.clone()).unwrap();
        let whole = cartan_entropy(&spec, &CartanElement::new(t.clone())).unwrap();
        let parts: f64 = factors
            .iter()
            .zip(&t)
            .map(|(f, v)| {
                let one = RootSystemSpec::new(vec![*f]).unwrap();
                cartan_entropy(&one, &CartanElement::new(vec![v.clone()])).unwrap().entropy
            })
            .sum();
        prop_assert!((whole.entropy - parts).abs() < 1e-9);
    }

    #[test]
    fn full_dimension_limit_is_the_algebra(n in 3usize..=5, t in element(5)) {
        let t: Vec<f64> = {
            let mut v = t[..n - 1].to_vec();
            v.push(-v.iter().sum::<f64>());
            v
        };
        let spec = RootSystemSpec::sl(&[n]).unwrap();
        let b = cartan_dim_bound(&spec, &CartanElement::new(vec![t]), None).unwrap();
        prop_assert!((b.bound - spec.dim() as f64).abs() < 1e-9, "{} vs {}", b.bound, spec.dim());
    }
}

#[test]
fn hypotheses_need_independent_projections() {
    let spec = RootSystemSpec::sl(&[3]).unwrap();
    let a1 = CartanElement::new(vec![vec![1.0, 0.0, -1.0]]);
    let good = check_theorem14_hypotheses(&spec, &a1, &CartanElement::new(vec![vec![0.0, 1.0, -1.0]])).unwrap();
    let bad = check_theorem14_hypotheses(&spec, &a1, &CartanElement::new(vec![vec![2.0, 0.0, -2.0]])).unwrap();
    assert!(good.passed);
    assert!(!bad.passed);
    assert_eq!(bad.failing_factors, vec![0]);
    let rank_one = RootSystemSpec::sl(&[2, 3]).unwrap();
    let a = CartanElement::new(vec![vec![1.0, -1.0], vec![1.0, 0.0, -1.0]]);
    assert!(check_theorem14_hypotheses(&rank_one, &a, &a).is_err());
}

#[test]
fn malformed_elements_are_rejected() {
    let spec = RootSystemSpec::sl(&[3]).unwrap();
    for bad in [vec![vec![1.0, 0.0]], vec![vec![1.0, 1.0, 1.0]], vec![vec![f64::NAN, 0.0, 0.0]]] {
        assert!(cartan_entropy(&spec, &CartanElement::new(bad)).is_err());
    }
}
