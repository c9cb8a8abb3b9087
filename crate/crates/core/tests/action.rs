use num_bigint::BigInt;
use proptest::prelude::*;
use toral_core::action::{commutes, find_commuting_partners, multiplicative_dependence, rank_one_factor_scan, CommutingPair, ScanVerdict};
use toral_core::ToralMap;

type M = Vec<Vec<BigInt>>;

fn big(m: &ToralMap) -> M {
    m.entries().iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn mul(a: &M, b: &M) -> M {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
}

fn pow(a: &M, e: u64) -> M {
    let n = a.len();
    let mut r: M = (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    for _ in 0..e {
        r = mul(&r, a);
    }
    r
}

/// `T^t = S^s`, with negative `s` checked as `T^t·S^{|s|} = I`.
fn holds(t: &ToralMap, s: &ToralMap, te: i64, se: i64) -> bool {
    let (tb, sb) = (big(t), big(s));
    let lhs = pow(&tb, te as u64);
    if se >= 0 {
        lhs == pow(&sb, se as u64)
    } else {
        mul(&lhs, &pow(&sb, se.unsigned_abs())) == pow(&tb, 0)
    }
}

/// Brute force over the whole box, including non-normalized exponents.
fn any_relation(t: &ToralMap, s: &ToralMap, bound: i64) -> bool {
    let s_inv = s.is_automorphism();
    (0..=bound).any(|te| {
        let lo = if s_inv { -bound } else { 0 };
        (lo..=bound).any(|se| (te, se) != (0, 0) && holds(t, s, te, se))
    })
}

fn seeds() -> Vec<ToralMap> {
    [
        vec![vec![2, 1], vec![1, 1]],
        vec![vec![0, 1], vec![1, 1]],
        vec![vec![0, 0, 1], vec![1, 0, 3], vec![0, 1, 0]],
        vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 0]],
    ]
    .into_iter()
    .map(|m| ToralMap::new(m).unwrap())
    .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn partners_commute_and_relations_verify(i in 0usize..4, bound in 1u32..=2) {
        let seed = &seeds()[i];
        let partners = find_commuting_partners(seed, bound).unwrap();
        for p in partners {
            prop_assert!(p.is_automorphism());
            prop_assert_eq!(mul(&big(seed), &big(&p)), mul(&big(&p), &big(seed)));
            let pair = CommutingPair::new(seed.clone(), p.clone()).unwrap();
            prop_assert!(pair.verified_commuting);
            let cert = multiplicative_dependence(&pair, 8).unwrap();
            match cert.relation {
                Some((t, s)) => {
                    prop_assert!(t > 0 || (t == 0 && s > 0));
                    prop_assert!(holds(seed, &p, t, s));
                }
                None => prop_assert!(!any_relation(seed, &p, 8)),
            }
        }
    }

    #[test]
    fn scalar_relations_match_brute_force(a in 2i64..=9, b in 2i64..=9) {
        let (ta, tb) = (ToralMap::times(a), ToralMap::times(b));
        let pair = CommutingPair::new(ta.clone(), tb.clone()).unwrap();
        let cert = multiplicative_dependence(&pair, 12).unwrap();
        prop_assert_eq!(cert.relation.is_some(), any_relation(&ta, &tb, 12));
        if let Some((t, s)) = cert.relation {
            prop_assert_eq!(BigInt::from(a).pow(t as u32), BigInt::from(b).pow(s as u32));
        }
    }
}

#[test]
fn commutation_is_detected() {
    let cat = ToralMap::new(vec![vec![2, 1], vec![1, 1]]).unwrap();
    let shear = ToralMap::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
    assert!(commutes(&cat, &cat.pow(3).unwrap()).unwrap());
    assert!(!commutes(&cat, &shear).unwrap());
    assert!(CommutingPair::new(cat.clone(), shear).map(|p| !p.verified_commuting).unwrap());
}

#[test]
fn diagonal_product_has_rank_one_factors() {
    let cat = ToralMap::new(vec![vec![2, 1], vec![1, 1]]).unwrap();
    let t = ToralMap::block_diag(&cat, &ToralMap::times(2)).unwrap();
    let s = ToralMap::block_diag(&cat.pow(2).unwrap(), &ToralMap::times(3)).unwrap();
    let report = rank_one_factor_scan(&CommutingPair::new(t, s).unwrap(), 20, 12).unwrap();
    assert_eq!(report.overall, ScanVerdict::RankOneFactorFound);
}
