use proptest::prelude::*;
use toral_core::bounds::{ly_min_unstable_dim, predicted_dim_bound, prop24_bound, DirectionData, LyapunovSpectrum, QGeometry};
use toral_core::ToralMap;

/// Minimum of `Σγ` over `Σκγ = h, 0 ≤ γ ≤ m` by enumerating the vertices
/// of the feasible polytope (all coordinates at a bound but at most one).
fn vertex_oracle(ex: &[(f64, usize)], h: f64) -> f64 {
    let k = ex.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << k) {
        let at = |i: usize| if mask >> i & 1 == 1 { ex[i].1 as f64 } else { 0.0 };
        for free in 0..=k {
            let fixed: f64 = (0..k).filter(|&i| i != free).map(|i| ex[i].0 * at(i)).sum();
            let sum_fixed: f64 = (0..k).filter(|&i| i != free).map(at).sum();
            if free == k {
                if (fixed - h).abs() <= 1e-9 * (1.0 + h) {
                    best = best.min(sum_fixed);
                }
                continue;
            }
            let g = (h - fixed) / ex[free].0;
            if g >= -1e-12 && g <= ex[free].1 as f64 + 1e-12 {
                best = best.min(sum_fixed + g.clamp(0.0, ex[free].1 as f64));
            }
        }
    }
    best
}

/// Literal grid with step `1e-4` on the smaller exponent; the larger one is
/// solved from the entropy constraint.
fn grid_oracle(ex: &[(f64, usize)], h: f64) -> f64 {
    match *ex {
        [(k1, m1)] => {
            let steps = (m1 as f64 / 1e-4).round() as u64;
            (0..=steps).map(|i| i as f64 * 1e-4).filter(|g| (k1 * g - h).abs() <= k1 * 1e-4).fold(f64::INFINITY, f64::min)
        }
        [(k1, m1), (k2, m2)] => {
            let steps = (m2 as f64 / 1e-4).round() as u64;
            let mut best = f64::INFINITY;
            for i in 0..=steps {
                let g2 = i as f64 * 1e-4;
                let g1 = (h - k2 * g2) / k1;
                if (-1e-12..=m1 as f64 + 1e-12).contains(&g1) {
                    best = best.min(g1 + g2);
                }
            }
            best
        }
        _ => unreachable!(),
    }
}

fn spectrum(max_len: usize) -> impl Strategy<Value = Vec<(f64, usize)>> {
    prop::collection::btree_set(1u32..4000, 1..=max_len).prop_flat_map(|set| {
        let n = set.len();
        let ks: Vec<f64> = set.into_iter().rev().map(|k| k as f64 / 1000.0).collect();
        (Just(ks), prop::collection::vec(1usize..=3, n)).prop_map(|(ks, ms)| ks.into_iter().zip(ms).collect())
    })
}

fn spectrum_and_entropy(max_len: usize) -> impl Strategy<Value = (Vec<(f64, usize)>, f64)> {
    spectrum(max_len).prop_flat_map(|ex| {
        let max: f64 = ex.iter().map(|&(k, m)| k * m as f64).sum();
        (Just(ex), 0.0..=max)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_matches_vertex_enumeration((ex, h) in spectrum_and_entropy(4)) {
        let alloc = ly_min_unstable_dim(&LyapunovSpectrum::new(ex.clone()).unwrap(), h).unwrap();
        let want = vertex_oracle(&ex, h);
        prop_assert!((alloc.delta_u - want).abs() < 1e-9, "{} vs {want}", alloc.delta_u);
        prop_assert!((alloc.achieved_entropy - h).abs() < 1e-9 * (1.0 + h));
        for (g, &(_, m)) in alloc.gammas.iter().zip(&ex) {
            prop_assert!(*g >= 0.0 && *g <= m as f64);
        }
    }

    #[test]
    fn greedy_matches_fine_grid((ex, h) in spectrum_and_entropy(2)) {
        let alloc = ly_min_unstable_dim(&LyapunovSpectrum::new(ex.clone()).unwrap(), h).unwrap();
        let want = grid_oracle(&ex, h);
        prop_assert!((alloc.delta_u - want).abs() <= 2e-4, "{} vs {want}", alloc.delta_u);
    }

    #[test]
    fn allocation_is_monotone_in_entropy((ex, h) in spectrum_and_entropy(4), t in 0.0f64..1.0) {
        let s = LyapunovSpectrum::new(ex).unwrap();
        let a = ly_min_unstable_dim(&s, h * t).unwrap();
        let b = ly_min_unstable_dim(&s, h).unwrap();
        prop_assert!(a.delta_u <= b.delta_u + 1e-12);
    }

    #[test]
    fn bound_chain_is_monotone_and_recovers_the_limit(a in 2i64..6, e1 in 0.0f64..=2.0, e2 in 0.0f64..=2.0) {
        // determinant 1, trace a + 1 ≥ 3
        let m = ToralMap::new(vec![vec![a, 1], vec![a - 1, 1]]).unwrap();
        let (fwd, bwd) = DirectionData::both(&m).unwrap();
        let bound = |e: f64| predicted_dim_bound(&fwd, bwd.as_ref(), QGeometry::new(2, e)).unwrap().combined;
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        prop_assert!(bound(lo) <= bound(hi) + 1e-12);
        prop_assert!((bound(2.0) - 2.0).abs() < 1e-12);
        prop_assert!(bound(hi) <= hi + 1e-9);
    }

    #[test]
    fn prop24_is_the_entropy_deficit(h in 0.0f64..5.0, d in 1usize..5, f in 0.0f64..1.0, l in 0.0f64..3.0) {
        let dim_f = f * d as f64;
        let b = prop24_bound(h, d, dim_f, l).unwrap();
        prop_assert!((b - (h - (d as f64 - dim_f) * l).max(0.0)).abs() < 1e-12);
    }
}

#[test]
fn expanding_scalars_give_unstable_dimension() {
    for b in 2..=7 {
        let (fwd, bwd) = DirectionData::both(&ToralMap::times(b)).unwrap();
        assert!(bwd.is_none());
        let r = predicted_dim_bound(&fwd, None, QGeometry::new(1, 1.0)).unwrap();
        assert_eq!(r.combined, 1.0);
        assert!(r.stable_side_omitted);
    }
}

#[test]
fn non_hyperbolic_maps_are_rejected() {
    let shear = ToralMap::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
    let (fwd, bwd) = DirectionData::both(&shear).unwrap();
    assert!(predicted_dim_bound(&fwd, bwd.as_ref(), QGeometry::new(2, 2.0)).is_err());
}
