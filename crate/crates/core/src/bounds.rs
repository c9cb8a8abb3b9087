//! Entropy and dimension lower-bound calculators: the entropy bound for
//! measures on closed invariant sets, minimal unstable dimension for a
//! given entropy, slicing combination, and the chain joining them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::spectral::{analyze, EntropyReport, SpectralData, ToralMap};
use crate::symbolic::{admissible_words, SftSpec};
use crate::{Error, Result};

/// Relative tolerance under which an entropy equal to the maximum is
/// treated as the maximum (absorbs rounding in independently summed logs).
pub const ENTROPY_SNAP: f64 = 1e-12;

/// `max(0, h_top − (d − dim_F)·log λ1)`.
pub fn prop24_bound(h_top: f64, d: usize, dim_f: f64, log_lambda1: f64) -> Result<f64> {
    let d = d as f64;
    if !(0.0..=d).contains(&dim_f) {
        return Err(Error::InvalidGeometry(format!("dim F = {dim_f} outside [0, {d}]")));
    }
    Ok((h_top - (d - dim_f) * log_lambda1).max(0.0))
}

/// Distinct positive exponents, strictly decreasing, with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSpectrum {
    pub exponents: Vec<(f64, usize)>,
}

impl LyapunovSpectrum {
    pub fn new(exponents: Vec<(f64, usize)>) -> Result<Self> {
        for (i, &(k, m)) in exponents.iter().enumerate() {
            if !(k > 0.0) || !k.is_finite() || m == 0 {
                return Err(Error::InvalidArgument(format!("exponent {k} with multiplicity {m}")));
            }
            if i > 0 && exponents[i - 1].0 <= k {
                return Err(Error::InvalidArgument("exponents must be strictly decreasing".into()));
            }
        }
        Ok(LyapunovSpectrum { exponents })
    }

    /// Positive exponents `log|λ|` of the expanding eigenvalues.
    pub fn unstable(spec: &SpectralData) -> Self {
        Self::collect(spec, 1.0)
    }

    /// Positive exponents `−log|λ|` of the contracting eigenvalues (the
    /// unstable spectrum of the inverse).
    pub fn stable(spec: &SpectralData) -> Self {
        Self::collect(spec, -1.0)
    }

    fn collect(spec: &SpectralData, sign: f64) -> Self {
        let mut raw: Vec<(f64, f64, usize)> = spec
            .eigenvalues
            .iter()
            .filter(|e| e.root_of_unity.is_none() && if sign > 0.0 { e.is_expanding() } else { e.is_contracting() })
            .map(|e| {
                let l = e.log_modulus();
                (sign * l.value, l.error_radius, e.multiplicity)
            })
            .collect();
        raw.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut out: Vec<(f64, f64, usize)> = Vec::new();
        for (k, r, m) in raw {
            match out.last_mut() {
                // overlapping enclosures name the same modulus
                Some(last) if (last.0 - k).abs() <= last.1 + r + ENTROPY_SNAP * k.abs() => last.2 += m,
                _ => out.push((k, r, m)),
            }
        }
        LyapunovSpectrum { exponents: out.into_iter().map(|(k, _, m)| (k, m)).collect() }
    }

    pub fn total_unstable_dim(&self) -> usize {
        self.exponents.iter().map(|e| e.1).sum()
    }

    pub fn max_entropy(&self) -> f64 {
        self.exponents.iter().map(|&(k, m)| k * m as f64).sum()
    }
}

/// Partial dimensions `γ_i ∈ [0, dim E_i]` realizing an entropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyAllocation {
    pub gammas: Vec<f64>,
    pub delta_u: f64,
    pub achieved_entropy: f64,
}

/// Minimal `Σ γ_i` subject to `Σ κ_i γ_i = entropy`, filling the largest
/// exponents first.
pub fn ly_min_unstable_dim(spectrum: &LyapunovSpectrum, entropy: f64) -> Result<LyAllocation> {
    let max = spectrum.max_entropy();
    if !(entropy >= 0.0) || entropy > max * (1.0 + ENTROPY_SNAP) + f64::MIN_POSITIVE {
        return Err(Error::EntropyOutOfRange { entropy, max });
    }
    let mut gammas = Vec::with_capacity(spectrum.exponents.len());
    let mut left = entropy;
    for &(k, m) in &spectrum.exponents {
        let full = k * m as f64;
        if left >= full * (1.0 - ENTROPY_SNAP) {
            gammas.push(m as f64);
            left = (left - full).max(0.0);
        } else {
            gammas.push(left / k);
            left = 0.0;
        }
    }
    let delta_u = gammas.iter().sum();
    let achieved_entropy = gammas.iter().zip(&spectrum.exponents).map(|(g, e)| g * e.0).sum();
    Ok(LyAllocation { gammas, delta_u, achieved_entropy })
}

/// Lower bound `dim(base) + inf dim(fiber)` for a sliced set.
pub fn marstrand_combine(dim_base: f64, dim_fiber_inf: f64) -> f64 {
    dim_base + dim_fiber_inf
}

/// Ambient dimension and the assumed dimension of the avoid-ball set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QGeometry {
    pub d: usize,
    pub assumed_dim_e: f64,
    /// Neutral dimension added after slicing (0 for toral maps).
    #[serde(default)]
    pub neutral_dim: f64,
}

impl QGeometry {
    pub fn new(d: usize, assumed_dim_e: f64) -> Self {
        QGeometry { d, assumed_dim_e, neutral_dim: 0.0 }
    }

    /// Geometry given by the deficit `d − dim E(q)`.
    pub fn from_deficit(d: usize, deficit: f64) -> Self {
        QGeometry::new(d, d as f64 - deficit)
    }
}

/// Entropy report and positive-exponent spectrum of one direction of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionData {
    pub entropy: EntropyReport,
    pub spectrum: LyapunovSpectrum,
}

impl DirectionData {
    pub fn from_map(map: &ToralMap) -> Result<Self> {
        let (spec, entropy) = analyze(map)?;
        Ok(DirectionData { entropy, spectrum: LyapunovSpectrum::unstable(&spec) })
    }

    /// Forward data and, for automorphisms, the data of the inverse.
    pub fn both(map: &ToralMap) -> Result<(Self, Option<Self>)> {
        let fwd = Self::from_map(map)?;
        let bwd = match map.inverse() {
            Some(inv) => Some(Self::from_map(&inv)?),
            None => None,
        };
        Ok((fwd, bwd))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub q_geometry: QGeometry,
    pub entropy_bound: f64,
    pub entropy_bound_backward: Option<f64>,
    pub unstable_allocation: LyAllocation,
    pub stable_allocation: Option<LyAllocation>,
    pub delta_u_bound: f64,
    pub delta_s_bound: f64,
    pub combined: f64,
    pub stable_side_omitted: bool,
    pub provenance: Vec<String>,
}

fn one_side(dir: &DirectionData, g: &QGeometry, label: &str, prov: &mut Vec<String>) -> Result<(f64, LyAllocation)> {
    let h = dir.entropy.h_top.value;
    let l1 = dir.entropy.log_lambda1.value;
    let bound = prop24_bound(h, g.d, g.assumed_dim_e, l1)?;
    prov.push(format!(
        "{label} entropy: h(ν) ≥ h_top − (d − dim E(q))·log|λ1| = {h} − ({} − {})·{l1} → {bound}",
        g.d, g.assumed_dim_e
    ));
    let alloc = ly_min_unstable_dim(&dir.spectrum, bound.min(dir.spectrum.max_entropy()))?;
    prov.push(format!(
        "{label} dimension: min Σγ_i subject to Σκ_iγ_i = h(ν), 0 ≤ γ_i ≤ dim E_i → {}",
        alloc.delta_u
    ));
    Ok((bound, alloc))
}

/// The bound chain: entropy bound → minimal unstable (and, for
/// automorphisms, stable) dimension → slicing sum.
pub fn predicted_dim_bound(
    forward: &DirectionData,
    backward: Option<&DirectionData>,
    geometry: QGeometry,
) -> Result<BoundReport> {
    if !forward.entropy.hyperbolic || backward.is_some_and(|b| !b.entropy.hyperbolic) {
        return Err(Error::InvalidGeometry("the bound chain needs a hyperbolic map".into()));
    }
    let expected = forward.entropy.expanding_dim + forward.entropy.contracting_dim + forward.entropy.neutral_dim;
    if expected != geometry.d {
        return Err(Error::DimensionMismatch(expected, geometry.d));
    }
    let mut provenance = Vec::new();
    let (entropy_bound, unstable) = one_side(forward, &geometry, "forward", &mut provenance)?;
    let (entropy_bound_backward, stable) = match backward {
        Some(b) => {
            let (e, a) = one_side(b, &geometry, "backward", &mut provenance)?;
            (Some(e), Some(a))
        }
        None => {
            provenance.push("stable side omitted: non-invertible map, bound by dim W^u only".into());
            (None, None)
        }
    };
    let delta_u_bound = unstable.delta_u;
    let delta_s_bound = stable.as_ref().map_or(0.0, |a| a.delta_u);
    let combined = marstrand_combine(delta_u_bound, delta_s_bound) + geometry.neutral_dim;
    provenance.push(format!(
        "slicing: dim ≥ δ_u + δ_s + dim H0 = {delta_u_bound} + {delta_s_bound} + {} = {combined}",
        geometry.neutral_dim
    ));
    Ok(BoundReport {
        q_geometry: geometry,
        entropy_bound,
        entropy_bound_backward,
        unstable_allocation: unstable,
        stable_allocation: stable,
        delta_u_bound,
        delta_s_bound,
        combined,
        stable_side_omitted: backward.is_none(),
        provenance,
    })
}

/// Box counts `(level, occupied cells)` and their least-squares slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub levels: Vec<(u32, u64)>,
    pub slope: f64,
}

/// Count occupied `2^{-j}` boxes for `j = 1..=bits` among points with
/// coordinates given as `bits`-bit integers.
pub fn box_count(points: &[Vec<u64>], bits: u32) -> BoxCount {
    let mut levels = Vec::new();
    for j in 1..=bits {
        let mut keys: Vec<Vec<u64>> = points.iter().map(|p| p.iter().map(|&x| x >> (bits - j)).collect()).collect();
        keys.sort_unstable();
        keys.dedup();
        levels.push((j, keys.len() as u64));
    }
    let xy: Vec<(f64, f64)> = levels.iter().map(|&(j, n)| (j as f64, libm::log2(n as f64))).collect();
    BoxCount { slope: least_squares_slope(&xy), levels }
}

pub fn least_squares_slope(xy: &[(f64, f64)]) -> f64 {
    let n = xy.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Box-count slope of `C × C`, with `C` the base-2 digit-restricted set of
/// the SFT, from the points `0.w000…` for admissible words `w` of length `depth`.
pub fn product_box_count(spec: &SftSpec, depth: u32) -> Result<BoxCount> {
    if spec.base() != 2 || depth == 0 || depth > 20 {
        return Err(Error::InvalidArgument("product box counting needs base 2 and depth in 1..=20".into()));
    }
    let words: Vec<u64> = admissible_words(spec, depth)?.into_iter().collect();
    let mut points = Vec::with_capacity(words.len() * words.len());
    for &x in &words {
        for &y in &words {
            points.push(alloc::vec![x, y]);
        }
    }
    Ok(box_count(&points, depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Polarity;
    use alloc::vec;

    #[test]
    fn prop24_examples() {
        let l2 = libm::log(2.0);
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        let b = prop24_bound(l2, 1, libm::log(phi) / l2, l2).unwrap();
        assert!((b - libm::log(phi)).abs() < 1e-15);
        assert_eq!(prop24_bound(1.3, 2, 2.0, 0.9).unwrap(), 1.3);
        assert_eq!(prop24_bound(0.5, 2, 0.0, 0.9).unwrap(), 0.0);
        assert!(matches!(prop24_bound(1.0, 1, 1.5, 1.0), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn greedy_examples() {
        let s = LyapunovSpectrum::new(vec![(libm::log(3.0), 1), (libm::log(2.0), 1)]).unwrap();
        let a = ly_min_unstable_dim(&s, libm::log(3.0) + libm::log(2.0) / 2.0).unwrap();
        assert!((a.delta_u - 1.5).abs() < 1e-15);
        let full = ly_min_unstable_dim(&s, s.max_entropy()).unwrap();
        assert_eq!(full.delta_u, 2.0);
        let one = LyapunovSpectrum::new(vec![(0.7, 1)]).unwrap();
        assert!((ly_min_unstable_dim(&one, 0.35).unwrap().delta_u - 0.5).abs() < 1e-15);
        assert!(matches!(ly_min_unstable_dim(&one, 0.8), Err(Error::EntropyOutOfRange { .. })));
        assert!(LyapunovSpectrum::new(vec![(0.5, 1), (0.7, 1)]).is_err());
    }

    #[test]
    fn chain_limits() {
        let cat = ToralMap::new(vec![vec![2, 1], vec![1, 1]]).unwrap();
        let (f, b) = DirectionData::both(&cat).unwrap();
        let r = predicted_dim_bound(&f, b.as_ref(), QGeometry::new(2, 2.0)).unwrap();
        assert_eq!(r.combined, 2.0);
        let r = predicted_dim_bound(&f, b.as_ref(), QGeometry::new(2, 1.9)).unwrap();
        assert!((r.combined - 1.8).abs() < 1e-12);
        let (f, b) = DirectionData::both(&ToralMap::times(2)).unwrap();
        assert!(b.is_none());
        let r = predicted_dim_bound(&f, None, QGeometry::new(1, 1.0)).unwrap();
        assert_eq!(r.combined, 1.0);
        assert!(r.stable_side_omitted);
    }

    #[test]
    fn equal_moduli_share_an_exponent() {
        // cat ⊕ cat: one exponent of multiplicity 2
        let m = ToralMap::new(vec![vec![2, 1, 0, 0], vec![1, 1, 0, 0], vec![0, 0, 2, 1], vec![0, 0, 1, 1]]).unwrap();
        let d = DirectionData::from_map(&m).unwrap();
        assert_eq!(d.spectrum.exponents.len(), 1);
        assert_eq!(d.spectrum.exponents[0].1, 2);
    }

    #[test]
    fn golden_product_box_count() {
        let g = SftSpec::from_words(2, &["11"], Polarity::Inner).unwrap();
        let bc = product_box_count(&g, 12).unwrap();
        assert_eq!(bc.levels[0], (1, 4));
        assert_eq!(bc.levels[11].1, 377 * 377);
        assert!(bc.slope >= 2.0 * 0.69424 - 0.05);
    }
}
