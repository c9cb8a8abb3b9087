//! Commuting pairs of toral maps: exact commutation, bounded searches for
//! multiplicative relations `T^t = S^s`, commuting partners from the
//! polynomial algebra of a seed, and rank-one factor scans.
//!
//! None of the searches is a decision procedure. "No relation" always means
//! "none with exponents up to the bound".

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::{primitive_vector, IntMatrix, RatMatrix};
use crate::poly::{self, IntPoly};
use crate::spectral::{self, ToralMap};
use crate::{Error, Result};

/// Default cap on the order of a root-of-unity twist `T^t S^{-s}`.
pub const DEFAULT_TWIST_CAP: u32 = 12;

pub fn commutes(a: &ToralMap, b: &ToralMap) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let (ma, mb) = (a.matrix(), b.matrix());
    Ok(ma.mul(&mb) == mb.mul(&ma))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutingPair {
    pub t_map: ToralMap,
    pub s_map: ToralMap,
    pub verified_commuting: bool,
}

impl CommutingPair {
    pub fn new(t_map: ToralMap, s_map: ToralMap) -> Result<Self> {
        let verified_commuting = commutes(&t_map, &s_map)?;
        Ok(CommutingPair { t_map, s_map, verified_commuting })
    }

    pub fn dim(&self) -> usize {
        self.t_map.dim()
    }

    fn require_commuting(&self) -> Result<()> {
        if self.verified_commuting {
            Ok(())
        } else {
            Err(Error::InvalidArgument("pair does not commute".into()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependenceCertificate {
    /// `(t, s)` with `T^t = S^s`, normalized so that `t > 0`, or `t = 0` and `s > 0`.
    pub relation: Option<(i64, i64)>,
    pub search_bound: u32,
    /// Entropy-ratio necessary-condition note, when both spectra are hyperbolic enough to compute.
    pub log_ratio_witness: Option<String>,
}

/// Exponent pairs in lexicographic order, normalized so the first nonzero
/// entry is positive; negative `s` only when `s_invertible`.
fn exponent_candidates(bound: i64, s_invertible: bool) -> impl Iterator<Item = (i64, i64)> {
    (0..=bound).flat_map(move |t| {
        let lo = if s_invertible { -bound } else { 0 };
        (lo..=bound).filter_map(move |s| match (t, s) {
            (0, s) if s <= 0 => None,
            _ => Some((t, s)),
        })
    })
}

/// Powers `M^0 ..= M^bound` and, if invertible, `M^{-1} ..= M^{-bound}`.
struct PowerTable {
    pos: Vec<RatMatrix>,
    neg: Vec<RatMatrix>,
}

impl PowerTable {
    fn new(m: &RatMatrix, inverse: Option<&RatMatrix>, bound: usize) -> Self {
        let mut pos = vec![RatMatrix::identity(m.rows())];
        for k in 0..bound {
            let next = pos[k].mul(m);
            pos.push(next);
        }
        let mut neg = vec![RatMatrix::identity(m.rows())];
        if let Some(inv) = inverse {
            for k in 0..bound {
                let next = neg[k].mul(inv);
                neg.push(next);
            }
        }
        PowerTable { pos, neg }
    }

    fn get(&self, e: i64) -> &RatMatrix {
        if e >= 0 {
            &self.pos[e as usize]
        } else {
            &self.neg[(-e) as usize]
        }
    }
}

/// Lexicographically smallest normalized relation `T^t = S^s` with
/// `max(|t|, |s|) ≤ bound`.
pub fn multiplicative_dependence(pair: &CommutingPair, bound: u32) -> Result<DependenceCertificate> {
    pair.require_commuting()?;
    if pair.t_map.kind() == spectral::MapKind::Singular || pair.s_map.kind() == spectral::MapKind::Singular {
        return Err(Error::SingularMap);
    }
    let t = pair.t_map.matrix().to_rat();
    let s = pair.s_map.matrix().to_rat();
    let s_inv = pair.s_map.inverse().map(|m| m.matrix().to_rat());
    let relation = find_relation(&t, &s, s_inv.as_ref(), bound, 1)?.map(|(t, s, _)| (t, s));
    let log_ratio_witness = entropy_note(pair, relation, bound);
    Ok(DependenceCertificate { relation, search_bound: bound, log_ratio_witness })
}

/// Search `(t, s)` in lexicographic order for `T^t S^{-s}` of finite order
/// `j ≤ twist_cap` (with `j = 1` an exact relation).
fn find_relation(
    t: &RatMatrix,
    s: &RatMatrix,
    s_inv: Option<&RatMatrix>,
    bound: u32,
    twist_cap: u32,
) -> Result<Option<(i64, i64, u32)>> {
    let b = bound as usize;
    let tp = PowerTable::new(t, None, b);
    // S^{-s} as a rational inverse is needed for the twist test even when
    // S is not invertible over ℤ; only the *exponent sign* is restricted.
    let s_rat_inv = match s_inv {
        Some(m) => Some(m.clone()),
        None => Some(rational_inverse(s).ok_or(Error::SingularMap)?),
    };
    let sp = PowerTable::new(s, s_rat_inv.as_ref(), b);
    for (te, se) in exponent_candidates(bound as i64, s_inv.is_some()) {
        let lhs = tp.get(te);
        if twist_cap <= 1 {
            if lhs == sp.get(se) {
                return Ok(Some((te, se, 1)));
            }
            continue;
        }
        // Z = T^t · S^{-s}
        let z = lhs.mul(sp.get(-se));
        if let Some(order) = finite_order(&z, twist_cap) {
            return Ok(Some((te, se, order)));
        }
    }
    Ok(None)
}

fn rational_inverse(m: &RatMatrix) -> Option<RatMatrix> {
    m.solve(&RatMatrix::identity(m.rows()))
}

/// Smallest `j ≤ cap` with `z^j = I`, if any.
fn finite_order(z: &RatMatrix, cap: u32) -> Option<u32> {
    if z.is_identity() {
        return Some(1);
    }
    // finite order forces a product of cyclotomic polynomials
    let cp = z.int_char_poly()?;
    let (rest, _) = poly::cyclotomic_part(&cp);
    if rest.degree() > 0 {
        return None;
    }
    let mut acc = z.clone();
    for j in 2..=cap {
        acc = acc.mul(z);
        if acc.is_identity() {
            return Some(j);
        }
    }
    None
}

fn entropy_note(pair: &CommutingPair, relation: Option<(i64, i64)>, bound: u32) -> Option<String> {
    let (_, rt) = spectral::analyze(&pair.t_map).ok()?;
    let (_, rs) = spectral::analyze(&pair.s_map).ok()?;
    let (ht, hs) = (rt.h_top, rs.h_top);
    let tol = |t: i64, s: i64| (t.unsigned_abs() as f64) * ht.error_radius + (s.unsigned_abs() as f64) * hs.error_radius + 1e-12;
    Some(match relation {
        Some((t, s)) => {
            let gap = (t as f64 * ht.value - s as f64 * hs.value).abs();
            format!("entropy check: |t·h(T) − s·h(S)| = {gap:e} ≤ {:e}", tol(t, s))
        }
        None => {
            let s_inv = pair.s_map.is_automorphism();
            let admitted = exponent_candidates(bound as i64, s_inv)
                .filter(|&(t, s)| (t as f64 * ht.value - s as f64 * hs.value).abs() <= tol(t, s))
                .count();
            if hs.value > 0.0 && admitted == 0 {
                format!(
                    "entropy ratio h(T)/h(S) = {} admits no (t, s) with max(|t|,|s|) ≤ {bound}",
                    ht.value / hs.value
                )
            } else {
                format!("entropy ratio test admits {admitted} candidate(s); exact powers rule them out")
            }
        }
    })
}

/// Nontrivial unimodular elements `p(seed)` of the polynomial algebra of
/// `seed`, coefficients in `[-coeff_bound, coeff_bound]`, excluding `±seed^k`
/// for `|k| ≤ 2`.
pub fn find_commuting_partners(seed: &ToralMap, coeff_bound: u32) -> Result<Vec<ToralMap>> {
    let cp = spectral::char_poly(seed);
    if !poly::is_irreducible(&cp) {
        use alloc::string::ToString;
        return Err(Error::ReducibleSeed(cp.to_string()));
    }
    let d = seed.dim();
    let m = seed.matrix();
    let powers: Vec<IntMatrix> = (0..d as u64).map(|k| m.pow(k)).collect();
    let mut excluded: Vec<IntMatrix> = Vec::new();
    for k in 0..=2u64 {
        let p = m.pow(k);
        excluded.push(p.neg());
        excluded.push(p);
    }
    if let Some(inv) = m.inverse() {
        for k in 1..=2u64 {
            let p = inv.pow(k);
            excluded.push(p.neg());
            excluded.push(p);
        }
    }
    let b = coeff_bound as i64;
    let mut coeffs = vec![-b; d];
    let mut out = Vec::new();
    loop {
        let mut acc = IntMatrix::zeros(d);
        for (c, p) in coeffs.iter().zip(&powers) {
            if *c != 0 {
                acc = acc.add(&p.scale(&BigInt::from(*c)));
            }
        }
        let det = acc.det();
        if (det == BigInt::one() || det == -BigInt::one()) && !excluded.contains(&acc) {
            let map = ToralMap::from_matrix(&acc)?;
            debug_assert!(commutes(seed, &map)?);
            out.push(map);
        }
        // odometer
        let mut pos = 0;
        while pos < d {
            coeffs[pos] += 1;
            if coeffs[pos] <= b {
                break;
            }
            coeffs[pos] = -b;
            pos += 1;
        }
        if pos == d {
            break;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum BlockVerdict {
    /// `T^t = ζ·S^s` on the block with `ζ` of order `twist_order`.
    DependentOnBlock { relation: (i64, i64), twist_order: u32 },
    IndependentUpToBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanVerdict {
    RankOneFactorFound,
    NoneFoundUpToBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    /// Primitive integer vectors spanning the rational invariant subspace.
    pub basis: Vec<Vec<i64>>,
    pub t_char_poly: Vec<i64>,
    pub s_char_poly: Vec<i64>,
    pub verdict: BlockVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorScanReport {
    pub blocks: Vec<BlockReport>,
    pub overall: ScanVerdict,
    pub bound: u32,
    pub twist_cap: u32,
    pub note: String,
}

/// Split `ℚ^d` into jointly invariant subspaces (primary decomposition for
/// `T`, refined by `S`) and search each block for a twisted relation.
pub fn rank_one_factor_scan(pair: &CommutingPair, bound: u32, twist_cap: u32) -> Result<FactorScanReport> {
    pair.require_commuting()?;
    let d = pair.dim();
    let t = pair.t_map.matrix().to_rat();
    let s = pair.s_map.matrix().to_rat();
    let identity_basis: Vec<Vec<BigInt>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut blocks = vec![identity_basis];
    for m in [&t, &s] {
        let mut refined = Vec::new();
        for basis in blocks {
            refined.extend(split_block(m, &basis)?);
        }
        blocks = refined;
    }

    let mut reports = Vec::new();
    for basis in blocks {
        let tb = restrict(&t, &basis)?;
        let sb = restrict(&s, &basis)?;
        let s_inv = if pair.s_map.is_automorphism() { rational_inverse(&sb) } else { None };
        let verdict = match find_relation(&tb, &sb, s_inv.as_ref(), bound, twist_cap.max(1))? {
            Some((te, se, j)) => BlockVerdict::DependentOnBlock { relation: (te, se), twist_order: j },
            None => BlockVerdict::IndependentUpToBound,
        };
        reports.push(BlockReport {
            basis: basis
                .iter()
                .map(|v| v.iter().map(|x| x.to_i64().ok_or_else(|| Error::Overflow("basis entry".into()))).collect())
                .collect::<Result<_>>()?,
            t_char_poly: poly_i64(&tb.int_char_poly().ok_or_else(|| Error::Overflow("block char poly".into()))?)?,
            s_char_poly: poly_i64(&sb.int_char_poly().ok_or_else(|| Error::Overflow("block char poly".into()))?)?,
            verdict,
        });
    }
    let found = reports.iter().any(|b| matches!(b.verdict, BlockVerdict::DependentOnBlock { .. }));
    Ok(FactorScanReport {
        blocks: reports,
        overall: if found { ScanVerdict::RankOneFactorFound } else { ScanVerdict::NoneFoundUpToBound },
        bound,
        twist_cap,
        note: format!(
            "bounded search: exponents up to {bound}, twists of order up to {twist_cap}; \
             a negative verdict is inconclusive and finite-index phenomena beyond the twist cap are not detected"
        ),
    })
}

fn poly_i64(p: &IntPoly) -> Result<Vec<i64>> {
    p.coeffs().iter().map(|c| c.to_i64().ok_or_else(|| Error::Overflow("polynomial coefficient".into()))).collect()
}

fn basis_matrix(basis: &[Vec<BigInt>]) -> RatMatrix {
    let d = basis[0].len();
    let cols: Vec<Vec<BigRational>> =
        basis.iter().map(|v| v.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    RatMatrix::from_columns(d, &cols)
}

/// Matrix of `m` restricted to the span of `basis`, in that basis.
fn restrict(m: &RatMatrix, basis: &[Vec<BigInt>]) -> Result<RatMatrix> {
    let b = basis_matrix(basis);
    b.solve(&m.mul(&b)).ok_or_else(|| Error::InvalidArgument("subspace is not invariant".into()))
}

fn split_block(m: &RatMatrix, basis: &[Vec<BigInt>]) -> Result<Vec<Vec<Vec<BigInt>>>> {
    let r = restrict(m, basis)?;
    let cp = r.int_char_poly().ok_or_else(|| Error::Overflow("restricted char poly".into()))?;
    let factors = poly::factor(&cp);
    if factors.len() <= 1 {
        return Ok(vec![basis.to_vec()]);
    }
    let b = basis_matrix(basis);
    let mut out = Vec::new();
    for (f, mult) in factors {
        let kernel = r.eval_poly(&f.pow(mult)).nullspace();
        let ambient: Vec<Vec<BigInt>> = kernel
            .iter()
            .map(|v| {
                let col = RatMatrix::from_columns(v.len(), &[v.iter().map(|x| BigRational::from_integer(x.clone())).collect()]);
                primitive_vector(&b.mul(&col).column(0))
            })
            .collect();
        out.push(ambient);
    }
    Ok(out)
}

/// Check that every basis vector is mapped into the span by `m` (exact).
pub fn is_invariant(m: &ToralMap, basis: &[Vec<i64>]) -> bool {
    let big: Vec<Vec<BigInt>> = basis.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
    restrict(&m.matrix().to_rat(), &big).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> ToralMap {
        ToralMap::new(vec![vec![2, 1], vec![1, 1]]).unwrap()
    }

    fn pair(t: ToralMap, s: ToralMap) -> CommutingPair {
        CommutingPair::new(t, s).unwrap()
    }

    #[test]
    fn commutation() {
        assert!(commutes(&cat(), &cat().pow(2).unwrap()).unwrap());
        assert!(commutes(&ToralMap::times(2), &ToralMap::times(3)).unwrap());
        let a = ToralMap::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        let b = ToralMap::new(vec![vec![1, 0], vec![1, 1]]).unwrap();
        assert!(!commutes(&a, &b).unwrap());
        assert_eq!(commutes(&a, &ToralMap::times(2)), Err(Error::DimensionMismatch(2, 1)));
    }

    #[test]
    fn dependence_examples() {
        let c = multiplicative_dependence(&pair(ToralMap::times(2), ToralMap::times(8)), 20).unwrap();
        assert_eq!(c.relation, Some((3, 1)));
        let c = multiplicative_dependence(&pair(ToralMap::times(2), ToralMap::times(3)), 20).unwrap();
        assert_eq!(c.relation, None);
        assert!(c.log_ratio_witness.unwrap().contains("admits no"));
        let c = multiplicative_dependence(&pair(cat(), cat().pow(2).unwrap()), 20).unwrap();
        assert_eq!(c.relation, Some((2, 1)));
    }

    #[test]
    fn inverse_relation_uses_negative_exponent() {
        let c = multiplicative_dependence(&pair(cat(), cat().inverse().unwrap()), 5).unwrap();
        assert_eq!(c.relation, Some((1, -1)));
    }

    #[test]
    fn partners_of_cat_companion() {
        let seed = ToralMap::companion(&IntPoly::from_i64(&[1, -3, 1])).unwrap();
        let partners = find_commuting_partners(&seed, 3).unwrap();
        let m_minus_i = ToralMap::from_matrix(&seed.matrix().add(&IntMatrix::identity(2).neg())).unwrap();
        assert!(partners.contains(&m_minus_i));
        for p in &partners {
            assert!(commutes(&seed, p).unwrap());
            assert!(p.is_automorphism());
        }
        assert!(!partners.contains(&seed));
    }

    #[test]
    fn partners_of_scalar_are_empty() {
        assert!(find_commuting_partners(&ToralMap::times(2), 3).unwrap().is_empty());
    }

    #[test]
    fn reducible_seed_rejected() {
        let seed = ToralMap::new(vec![vec![2, 0], vec![0, 3]]).unwrap();
        assert!(matches!(find_commuting_partners(&seed, 1), Err(Error::ReducibleSeed(_))));
    }

    #[test]
    fn scans() {
        let r = rank_one_factor_scan(&pair(ToralMap::times(2), ToralMap::times(2)), 20, DEFAULT_TWIST_CAP).unwrap();
        assert_eq!(r.overall, ScanVerdict::RankOneFactorFound);
        assert_eq!(r.blocks[0].verdict, BlockVerdict::DependentOnBlock { relation: (1, 1), twist_order: 1 });

        let r = rank_one_factor_scan(&pair(ToralMap::times(2), ToralMap::times(3)), 20, DEFAULT_TWIST_CAP).unwrap();
        assert_eq!(r.overall, ScanVerdict::NoneFoundUpToBound);

        let t = ToralMap::new(vec![vec![2, 0], vec![0, 2]]).unwrap();
        let s = ToralMap::new(vec![vec![3, 0], vec![0, 2]]).unwrap();
        let r = rank_one_factor_scan(&pair(t.clone(), s.clone()), 20, DEFAULT_TWIST_CAP).unwrap();
        assert_eq!(r.blocks.len(), 2);
        assert_eq!(r.overall, ScanVerdict::RankOneFactorFound);
        for b in &r.blocks {
            assert!(is_invariant(&t, &b.basis) && is_invariant(&s, &b.basis));
            match b.basis[0].as_slice() {
                [0, 1] => assert_eq!(b.verdict, BlockVerdict::DependentOnBlock { relation: (1, 1), twist_order: 1 }),
                [1, 0] => assert_eq!(b.verdict, BlockVerdict::IndependentUpToBound),
                other => panic!("unexpected basis {other:?}"),
            }
        }
    }

    #[test]
    fn twisted_relation() {
        // S = -T on the cat map: T = ζ S with ζ = -1, order 2
        let r = rank_one_factor_scan(&pair(cat(), ToralMap::from_matrix(&cat().matrix().neg()).unwrap()), 3, 12)
            .unwrap();
        assert_eq!(r.blocks[0].verdict, BlockVerdict::DependentOnBlock { relation: (1, 1), twist_order: 2 });
        let c = multiplicative_dependence(&pair(cat(), ToralMap::from_matrix(&cat().matrix().neg()).unwrap()), 3)
            .unwrap();
        assert_eq!(c.relation, Some((2, 2)));
    }
}
