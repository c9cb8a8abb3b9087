//! Toral maps and their certified spectral data.
//!
//! Eigenvalues are never computed by a floating eigensolver. The
//! characteristic polynomial is formed exactly, split into square-free and
//! cyclotomic pieces over ℤ, and each piece's roots are isolated in
//! certified disks (see [`crate::roots`]). Whether an eigenvalue is a root of
//! unity is decided by exact division by cyclotomic polynomials.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::approx::{ulp, Approx};
use crate::matrix::IntMatrix;
use crate::poly::{self, IntPoly};
use crate::roots::{self, RootDisk};
use crate::{Error, Result};

/// Default radius budget for eigenvalue disks.
pub const DEFAULT_PRECISION: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// `det = ±1`
    Automorphism,
    /// `det ≠ 0`
    Epimorphism,
    /// `det = 0`
    Singular,
}

/// An integer matrix acting on `T^d`.
///
/// Serialized as a JSON array of integer rows; `kind` is always recomputed
/// from the exact determinant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct ToralMap {
    entries: Vec<Vec<i64>>,
    kind: MapKind,
}

impl TryFrom<Vec<Vec<i64>>> for ToralMap {
    type Error = Error;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        ToralMap::new(rows)
    }
}

impl From<ToralMap> for Vec<Vec<i64>> {
    fn from(m: ToralMap) -> Self {
        m.entries
    }
}

impl ToralMap {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let m = IntMatrix::from_rows(&entries)?;
        let det = m.det();
        let kind = if det.is_zero() {
            MapKind::Singular
        } else if det.abs() == BigInt::from(1) {
            MapKind::Automorphism
        } else {
            MapKind::Epimorphism
        };
        Ok(ToralMap { entries, kind })
    }

    /// Multiplication by `b` on the circle.
    pub fn times(b: i64) -> Self {
        ToralMap::new(alloc::vec![alloc::vec![b]]).expect("1x1 matrix")
    }

    pub fn from_matrix(m: &IntMatrix) -> Result<Self> {
        let rows = m.rows_i64().ok_or_else(|| Error::Overflow("matrix entry exceeds i64".into()))?;
        ToralMap::new(rows)
    }

    /// Companion matrix of a monic integer polynomial.
    pub fn companion(p: &IntPoly) -> Result<Self> {
        ToralMap::from_matrix(&IntMatrix::companion(p)?)
    }

    /// Block-diagonal sum of two maps.
    pub fn block_diag(a: &ToralMap, b: &ToralMap) -> Result<Self> {
        let n = a.dim() + b.dim();
        let mut rows = alloc::vec![alloc::vec![0i64; n]; n];
        for (i, r) in a.entries.iter().enumerate() {
            rows[i][..a.dim()].copy_from_slice(r);
        }
        for (i, r) in b.entries.iter().enumerate() {
            rows[a.dim() + i][a.dim()..].copy_from_slice(r);
        }
        ToralMap::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn is_automorphism(&self) -> bool {
        self.kind == MapKind::Automorphism
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.entries).expect("validated on construction")
    }

    pub fn det(&self) -> BigInt {
        self.matrix().det()
    }

    pub fn pow(&self, n: u64) -> Result<Self> {
        ToralMap::from_matrix(&self.matrix().pow(n))
    }

    /// Inverse map, for automorphisms only.
    pub fn inverse(&self) -> Option<Self> {
        self.matrix().inverse().and_then(|m| ToralMap::from_matrix(&m).ok())
    }

    /// Largest row sum of absolute entries.
    pub fn max_abs_row_sum(&self) -> u64 {
        self.entries.iter().map(|r| r.iter().map(|v| v.unsigned_abs()).sum::<u64>()).max().unwrap_or(0)
    }

    /// True when the map is multiplication by an integer on `T^1`.
    pub fn as_scalar(&self) -> Option<i64> {
        (self.dim() == 1).then(|| self.entries[0][0])
    }
}

/// Exact characteristic polynomial `det(xI − M)`.
pub fn char_poly(map: &ToralMap) -> IntPoly {
    map.matrix().char_poly()
}

/// One distinct eigenvalue with its certified disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub error_radius: f64,
    /// Order `n` when the eigenvalue is a primitive `n`-th root of unity.
    pub root_of_unity: Option<u64>,
}

impl Eigenvalue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(&self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    pub fn arg(&self) -> f64 {
        libm::atan2(self.im, self.re)
    }

    /// Certified enclosure of `|λ|`.
    pub fn modulus_bounds(&self) -> (f64, f64) {
        let m = self.modulus();
        let slack = ulp(m) * 2.0;
        ((m - self.error_radius - slack).max(0.0), m + self.error_radius + slack)
    }

    pub fn is_expanding(&self) -> bool {
        self.modulus_bounds().0 > 1.0
    }

    pub fn is_contracting(&self) -> bool {
        self.modulus_bounds().1 < 1.0
    }

    /// `log|λ|` with an error radius covering the disk.
    pub fn log_modulus(&self) -> Approx {
        let (lo, hi) = self.modulus_bounds();
        let v = libm::log(self.modulus());
        if lo <= 0.0 {
            return Approx::new(v, f64::INFINITY);
        }
        let r = (libm::log(hi) - v).abs().max((v - libm::log(lo)).abs());
        Approx::new(v, r + 2.0 * ulp(v))
    }
}

/// Certified spectrum: distinct eigenvalues and their ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub dim: usize,
    /// Ascending coefficients of the characteristic polynomial.
    pub char_poly: Vec<i64>,
    pub eigenvalues: Vec<Eigenvalue>,
    /// Indices into `eigenvalues`: descending modulus, then ascending
    /// argument, then index.
    pub ordering: Vec<usize>,
}

impl SpectralData {
    pub fn sorted(&self) -> impl Iterator<Item = &Eigenvalue> {
        self.ordering.iter().map(move |&i| &self.eigenvalues[i])
    }

    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    pub fn max_error_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.error_radius).fold(0.0, f64::max)
    }

    /// `log|λ_1|`, the largest log-modulus.
    pub fn log_lambda1(&self) -> Approx {
        self.sorted().next().map(|e| e.log_modulus()).unwrap_or(Approx::ZERO)
    }

    pub fn has_root_of_unity(&self) -> bool {
        self.eigenvalues.iter().any(|e| e.root_of_unity.is_some())
    }
}

/// Certified spectral data of a nonsingular map.
///
/// `precision` bounds each disk radius, relative to `max(1, |λ|)`.
pub fn spectral_data(map: &ToralMap, precision: f64) -> Result<SpectralData> {
    if map.kind() == MapKind::Singular {
        return Err(Error::SingularMap);
    }
    let cp = char_poly(map);
    let cp_i64: Vec<i64> = cp
        .coeffs()
        .iter()
        .map(|c| c.to_i64().ok_or_else(|| Error::Overflow("characteristic polynomial coefficient".into())))
        .collect::<Result<_>>()?;

    // (square-free piece, multiplicity, root-of-unity order)
    let mut pieces: Vec<(IntPoly, usize, Option<u64>)> = Vec::new();
    for (f, mult) in poly::squarefree_decomposition(&cp) {
        let (rest, cyc) = poly::cyclotomic_part(&f);
        for (order, _) in cyc {
            pieces.push((poly::cyclotomic(order), mult, Some(order)));
        }
        if rest.degree() > 0 {
            pieces.push((rest, mult, None));
        }
    }

    let mut eigenvalues = Vec::new();
    let mut disks: Vec<RootDisk> = Vec::new();
    for (f, mult, order) in &pieces {
        for d in roots::isolate(f, precision)? {
            disks.push(d);
            eigenvalues.push(Eigenvalue {
                re: d.center.re,
                im: d.center.im,
                multiplicity: *mult,
                error_radius: d.radius,
                root_of_unity: *order,
            });
        }
    }
    roots::check_disjoint(&disks, precision)?;
    debug_assert_eq!(eigenvalues.iter().map(|e| e.multiplicity).sum::<usize>(), map.dim());

    let ordering = order_eigenvalues(&eigenvalues);
    Ok(SpectralData { dim: map.dim(), char_poly: cp_i64, eigenvalues, ordering })
}

/// Descending modulus with ties (overlapping modulus enclosures, chained)
/// broken by ascending argument and then original index.
fn order_eigenvalues(ev: &[Eigenvalue]) -> Vec<usize> {
    let mut by_mod: Vec<usize> = (0..ev.len()).collect();
    by_mod.sort_by(|&a, &b| ev[b].modulus().total_cmp(&ev[a].modulus()).then(a.cmp(&b)));
    let mut cluster = alloc::vec![0usize; ev.len()];
    let mut c = 0;
    for w in 1..by_mod.len() {
        let (hi_prev, lo_prev) = (ev[by_mod[w - 1]].modulus_bounds().0, ev[by_mod[w]].modulus_bounds().1);
        if lo_prev < hi_prev {
            c += 1;
        }
        cluster[by_mod[w]] = c;
    }
    let mut idx: Vec<usize> = (0..ev.len()).collect();
    idx.sort_by(|&a, &b| {
        cluster[a]
            .cmp(&cluster[b])
            .then_with(|| ev[a].arg().partial_cmp(&ev[b].arg()).unwrap_or(Ordering::Equal))
            .then(a.cmp(&b))
    });
    idx
}

/// Entropy and hyperbolicity summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    /// Topological entropy in nats.
    pub h_top: Approx,
    /// Fraction of `h_top` left after dropping the smallest expanding
    /// log-modulus once.
    pub kappa: Approx,
    /// Set when exactly one expanding eigenvalue of multiplicity one exists,
    /// so `kappa` is 0 by convention.
    pub kappa_degenerate: bool,
    pub log_lambda1: Approx,
    pub expanding_dim: usize,
    pub contracting_dim: usize,
    pub neutral_dim: usize,
    pub hyperbolic: bool,
    pub ergodic: bool,
}

pub fn entropy_report(map: &ToralMap, spec: &SpectralData) -> Result<EntropyReport> {
    if map.dim() != spec.dim {
        return Err(Error::DimensionMismatch(map.dim(), spec.dim));
    }
    let mut expanding = 0;
    let mut contracting = 0;
    let mut neutral = 0;
    let mut h = Approx::ZERO;
    let mut smallest: Option<Approx> = None;
    for e in &spec.eigenvalues {
        if e.root_of_unity.is_some() {
            neutral += e.multiplicity;
        } else if e.is_expanding() {
            expanding += e.multiplicity;
            let l = e.log_modulus();
            h = h + l * e.multiplicity as f64;
            if smallest.is_none_or(|s| l.value < s.value) {
                smallest = Some(l);
            }
        } else if e.is_contracting() {
            contracting += e.multiplicity;
        } else {
            return Err(Error::NeutralSpectrum { modulus: e.modulus() });
        }
    }
    let (kappa, kappa_degenerate) = match (expanding, smallest) {
        (n, Some(min)) if n >= 2 => {
            let numer = Approx::new(h.value - min.value, h.error_radius + min.error_radius + ulp(h.value));
            let k = numer.div(h);
            (Approx::new(k.value.clamp(0.0, 1.0), k.error_radius), false)
        }
        (1, _) => (Approx::ZERO, true),
        _ => (Approx::ZERO, false),
    };
    let log_lambda1 = if expanding > 0 { spec.log_lambda1() } else { Approx::ZERO };
    Ok(EntropyReport {
        h_top: h,
        kappa,
        kappa_degenerate,
        log_lambda1,
        expanding_dim: expanding,
        contracting_dim: contracting,
        neutral_dim: neutral,
        hyperbolic: neutral == 0,
        ergodic: !spec.has_root_of_unity(),
    })
}

/// Spectral data and entropy report in one call, at the default precision.
pub fn analyze(map: &ToralMap) -> Result<(SpectralData, EntropyReport)> {
    let s = spectral_data(map, DEFAULT_PRECISION)?;
    let r = entropy_report(map, &s)?;
    Ok((s, r))
}

/// Human-readable description of the characteristic polynomial.
pub fn char_poly_string(map: &ToralMap) -> String {
    use alloc::string::ToString;
    char_poly(map).to_string()
}
