use proptest::prelude::*;
use toral_core::spectral::{analyze, char_poly};
use toral_core::ToralMap;

/// `Σ log⁺|λ|` for a 2×2 integer matrix from the quadratic formula.
fn entropy_2x2(m: [[i64; 2]; 2]) -> f64 {
    let tr = (m[0][0] + m[1][1]) as f64;
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) as f64;
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let r = disc.sqrt();
        [(tr + r) / 2.0, (tr - r) / 2.0].iter().map(|l| l.abs().ln().max(0.0)).sum()
    } else {
        // complex pair of modulus √det
        2.0 * (det.sqrt().ln()).max(0.0)
    }
}

fn map2(m: [[i64; 2]; 2]) -> ToralMap {
    ToralMap::new(vec![m[0].to_vec(), m[1].to_vec()]).unwrap()
}

/// Products of elementary matrices are unimodular.
fn unimodular() -> impl Strategy<Value = [[i64; 2]; 2]> {
    prop::collection::vec((-3i64..=3, any::<bool>()), 1..5).prop_map(|steps| {
        let mut m = [[1i64, 0], [0, 1]];
        for (k, upper) in steps {
            let e = if upper { [[1, k], [0, 1]] } else { [[1, 0], [k, 1]] };
            m = [
                [m[0][0] * e[0][0] + m[0][1] * e[1][0], m[0][0] * e[0][1] + m[0][1] * e[1][1]],
                [m[1][0] * e[0][0] + m[1][1] * e[1][0], m[1][0] * e[0][1] + m[1][1] * e[1][1]],
            ];
        }
        m
    })
}

fn nonsingular() -> impl Strategy<Value = [[i64; 2]; 2]> {
    prop::array::uniform2(prop::array::uniform2(-6i64..=6)).prop_filter("det ≠ 0", |m| m[0][0] * m[1][1] != m[0][1] * m[1][0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entropy_matches_quadratic_formula(m in nonsingular()) {
        let (_, r) = analyze(&map2(m)).unwrap();
        let want = entropy_2x2(m);
        prop_assert!((r.h_top.value - want).abs() < 1e-9, "{} vs {want}", r.h_top);
        prop_assert!(r.h_top.error_radius < 1e-9);
    }

    #[test]
    fn inverse_has_same_entropy(m in unimodular()) {
        let t = map2(m);
        let inv = t.inverse().expect("unimodular");
        let (_, a) = analyze(&t).unwrap();
        let (_, b) = analyze(&inv).unwrap();
        prop_assert!((a.h_top.value - b.h_top.value).abs() < 1e-9);
        prop_assert_eq!(a.expanding_dim, b.contracting_dim);
        prop_assert_eq!(a.contracting_dim, b.expanding_dim);
    }

    #[test]
    fn entropy_scales_with_powers(m in nonsingular(), k in 1u64..5) {
        let t = map2(m);
        let (_, a) = analyze(&t).unwrap();
        let (_, b) = analyze(&t.pow(k).unwrap()).unwrap();
        prop_assert!((b.h_top.value - k as f64 * a.h_top.value).abs() < 1e-8 * (1.0 + b.h_top.value));
    }

    #[test]
    fn multiplicities_add_up(m in nonsingular(), c in prop_oneof![-4i64..=-2, 2i64..=4]) {
        // distinct eigenvalues, none equal to c
        let (tr, det) = (m[0][0] + m[1][1], m[0][0] * m[1][1] - m[0][1] * m[1][0]);
        prop_assume!(tr * tr != 4 * det && c * c - tr * c + det != 0);
        let t = map2(m);
        let doubled = ToralMap::block_diag(&t, &t).unwrap();
        let with_scalar = ToralMap::block_diag(&doubled, &ToralMap::times(c)).unwrap();
        let (s1, r1) = analyze(&t).unwrap();
        let (s3, r3) = analyze(&with_scalar).unwrap();
        prop_assert_eq!(s3.total_multiplicity(), 5);
        prop_assert_eq!(s3.eigenvalues.len(), s1.eigenvalues.len() + 1);
        let doubled_mult: usize = s3.eigenvalues.iter().filter(|e| e.multiplicity >= 2).map(|e| e.multiplicity).sum();
        prop_assert_eq!(doubled_mult, 2 * s1.total_multiplicity());
        let want = 2.0 * r1.h_top.value + (c.unsigned_abs() as f64).ln();
        prop_assert!((r3.h_top.value - want).abs() < 1e-9);
    }

    #[test]
    fn char_poly_is_monic_of_full_degree(m in nonsingular()) {
        let p = char_poly(&map2(m));
        prop_assert_eq!(p.degree(), 2);
        prop_assert!(p.is_monic());
    }
}

#[test]
fn kappa_of_two_cat_blocks_is_half() {
    let cat = map2([[2, 1], [1, 1]]);
    let (_, r) = analyze(&ToralMap::block_diag(&cat, &cat).unwrap()).unwrap();
    assert!((r.kappa.value - 0.5).abs() < 1e-12);
    assert!(!r.kappa_degenerate);
    let (_, single) = analyze(&cat).unwrap();
    assert_eq!(single.kappa.value, 0.0);
    assert!(single.kappa_degenerate);
}

#[test]
fn rotation_by_quarter_turn_is_neutral() {
    let (s, r) = analyze(&map2([[0, -1], [1, 0]])).unwrap();
    assert_eq!(r.h_top.value, 0.0);
    assert_eq!(r.neutral_dim, 2);
    assert!(!r.hyperbolic && !r.ergodic);
    assert!(s.eigenvalues.iter().all(|e| e.root_of_unity == Some(4)));
}
