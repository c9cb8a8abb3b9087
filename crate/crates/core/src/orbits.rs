//! Exact orbit iteration on `T^d`, cell histograms, density verdicts and
//! avoid-ball checks.
//!
//! A [`TorusPoint`] stores integer numerators over a common denominator
//! `R`. When the point is a truncation of some true point `x` (a finite
//! prefix of a digit expansion), `x` lies in the box `a/R + [0, 1/R)^d`.
//! Iteration keeps the representative exact and pushes the box forward
//! with `M⁺` and `M⁻`; a step is recorded only while the whole box stays
//! inside one grid cell, so every recorded visit holds for the true point.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::spectral::ToralMap;
use crate::symbolic::{BallSpec, DigitWord};
use crate::{Error, Result};

/// Largest number of grid cells a histogram may hold.
pub const MAX_CELLS: u64 = 1 << 24;

/// A point of `T^d` with exact numerators over a common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusPoint {
    denominator: BigUint,
    coords: Vec<BigUint>,
    /// Radix and digit count when the denominator is `radix^precision`.
    radix: u32,
    precision: u32,
    /// When set the true point lies in `coords/R + [0, 1/R)^d`.
    truncated: bool,
}

#[derive(Serialize)]
struct PointRepr {
    radix: u32,
    precision: u32,
    truncated: bool,
    denominator: String,
    coords: Vec<String>,
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        PointRepr {
            radix: self.radix,
            precision: self.precision,
            truncated: self.truncated,
            denominator: self.denominator.to_string(),
            coords: self.coords.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl TorusPoint {
    /// The exact point `nums / den` (reduced mod 1).
    pub fn exact(nums: &[u64], den: u64) -> Result<Self> {
        if den == 0 || nums.is_empty() {
            return Err(Error::InvalidArgument("point needs a coordinate and a positive denominator".into()));
        }
        Ok(TorusPoint {
            denominator: BigUint::from(den),
            coords: nums.iter().map(|&n| BigUint::from(n % den)).collect(),
            radix: 0,
            precision: 0,
            truncated: false,
        })
    }

    pub fn origin(dim: usize) -> Self {
        TorusPoint { denominator: BigUint::one(), coords: vec![BigUint::zero(); dim], radix: 0, precision: 0, truncated: false }
    }

    /// A truncated point from per-coordinate digit strings of equal length.
    pub fn from_digits(base: u32, digits: &[&[u8]]) -> Result<Self> {
        if base < 2 || digits.is_empty() {
            return Err(Error::InvalidArgument("digit point needs base ≥ 2 and a coordinate".into()));
        }
        let p = digits[0].len();
        if digits.iter().any(|d| d.len() != p) {
            return Err(Error::InvalidArgument("coordinates must have equal digit counts".into()));
        }
        let b = BigUint::from(base);
        let coords = digits
            .iter()
            .map(|ds| {
                ds.iter().try_fold(BigUint::zero(), |acc, &d| {
                    if (d as u32) < base {
                        Ok(acc * &b + BigUint::from(d))
                    } else {
                        Err(Error::InvalidArgument(format!("digit {d} out of range for base {base}")))
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TorusPoint { denominator: b.pow(p as u32), coords, radix: base, precision: p as u32, truncated: true })
    }

    /// The 1-D truncated point named by a sampled digit word.
    pub fn from_word(word: &DigitWord) -> Result<Self> {
        TorusPoint::from_digits(word.base, &[&word.digits])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn numerators(&self) -> &[BigUint] {
        &self.coords
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let bits = self.denominator.bits();
        let shift = bits.saturating_sub(60);
        let den = (&self.denominator >> shift).to_u64_digits().first().copied().unwrap_or(0) as f64;
        self.coords
            .iter()
            .map(|c| {
                let n = (c >> shift).to_u64_digits().first().copied().unwrap_or(0) as f64;
                if den == 0.0 { 0.0 } else { n / den }
            })
            .collect()
    }
}

/// Visit counts over the `g^m`-adic grid of `T^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellHistogram {
    pub dim: usize,
    pub grid_base: u32,
    pub depth: u32,
    pub visits: Vec<u64>,
    /// First step at which each cell was visited.
    pub first_visit: Vec<Option<u64>>,
    /// Number of recorded points; equals the sum of `visits`.
    pub recorded: u64,
}

fn cells_per_axis(grid_base: u32, depth: u32) -> Result<u64> {
    (grid_base as u64).checked_pow(depth).ok_or_else(|| Error::InvalidArgument("grid too fine".into()))
}

impl CellHistogram {
    pub fn new(dim: usize, grid_base: u32, depth: u32) -> Result<Self> {
        if grid_base < 2 || dim == 0 {
            return Err(Error::InvalidArgument("grid needs base ≥ 2 and dimension ≥ 1".into()));
        }
        let c = cells_per_axis(grid_base, depth)?;
        let total = c.checked_pow(dim as u32).filter(|&t| t <= MAX_CELLS).ok_or_else(|| {
            Error::InvalidArgument(format!("{grid_base}^({depth}·{dim}) cells exceed the cap {MAX_CELLS}"))
        })?;
        Ok(CellHistogram {
            dim,
            grid_base,
            depth,
            visits: vec![0; total as usize],
            first_visit: vec![None; total as usize],
            recorded: 0,
        })
    }

    pub fn cells(&self) -> usize {
        self.visits.len()
    }

    /// Record a visit to the cell with per-axis indices `idx` (axis 0 most significant).
    pub fn record(&mut self, idx: &[u64], step: u64) -> bool {
        let c = (self.grid_base as u64).pow(self.depth);
        let flat = idx.iter().fold(0u64, |acc, &i| acc * c + i) as usize;
        self.visits[flat] += 1;
        self.recorded += 1;
        if self.first_visit[flat].is_none() {
            self.first_visit[flat] = Some(step);
            true
        } else {
            false
        }
    }

    /// Histogram of exact points given in sequence (step = position).
    pub fn from_points<'a, I: IntoIterator<Item = &'a TorusPoint>>(
        points: I,
        dim: usize,
        grid_base: u32,
        depth: u32,
    ) -> Result<Self> {
        let mut h = CellHistogram::new(dim, grid_base, depth)?;
        let c = BigUint::from(cells_per_axis(grid_base, depth)?);
        for (step, p) in points.into_iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch(dim, p.dim()));
            }
            let idx: Vec<u64> = p
                .coords
                .iter()
                .map(|a| (a * &c / &p.denominator).to_u64_digits().first().copied().unwrap_or(0))
                .collect();
            h.record(&idx, step as u64);
        }
        Ok(h)
    }

    /// Aggregate to a coarser depth `k ≤ depth`.
    pub fn coarsen(&self, k: u32) -> Result<CellHistogram> {
        if k > self.depth {
            return Err(Error::DepthTooCoarse { depth: self.depth, epsilon: 0.0 });
        }
        let mut out = CellHistogram::new(self.dim, self.grid_base, k)?;
        let g = self.grid_base as u64;
        let fine = g.pow(self.depth);
        let coarse = g.pow(k);
        let ratio = g.pow(self.depth - k);
        for (flat, (&v, &f)) in self.visits.iter().zip(&self.first_visit).enumerate() {
            if v == 0 {
                continue;
            }
            let mut rest = flat as u64;
            let mut target = 0u64;
            let mut place = 1u64;
            for _ in 0..self.dim {
                target += (rest % fine / ratio) * place;
                rest /= fine;
                place *= coarse;
            }
            let t = target as usize;
            out.visits[t] += v;
            out.first_visit[t] = match (out.first_visit[t], f) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
        }
        out.recorded = self.recorded;
        Ok(out)
    }

    /// Max over all `g`-adic cubes of levels `1..=depth` of |empirical − volume|.
    pub fn discrepancy(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        let total = self.recorded as f64;
        for k in 1..=self.depth {
            let h = self.coarsen(k)?;
            let vol = 1.0 / h.cells() as f64;
            for &v in &h.visits {
                let emp = if total > 0.0 { v as f64 / total } else { 0.0 };
                worst = worst.max((emp - vol).abs());
            }
        }
        Ok(worst)
    }

    /// Density verdict on the coarsest grid of mesh at most `epsilon`.
    pub fn density(&self, epsilon: f64) -> Result<DensityVerdict> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be positive")));
        }
        let g = self.grid_base as f64;
        let mut k = 0u32;
        let mut mesh = 1.0f64;
        while mesh > epsilon {
            k += 1;
            mesh /= g;
            if k > self.depth {
                return Err(Error::DepthTooCoarse { depth: self.depth, epsilon });
            }
        }
        let h = self.coarsen(k)?;
        let empty = h.visits.iter().filter(|&&v| v == 0).count() as u64;
        let achieved = empty == 0 && h.cells() > 0;
        let first_cover_step = if achieved { h.first_visit.iter().map(|f| f.unwrap_or(0)).max() } else { None };
        Ok(DensityVerdict {
            epsilon,
            grid_depth: k,
            mesh,
            cells: h.cells() as u64,
            achieved,
            first_cover_step,
            empty_cells: empty,
            discrepancy: self.discrepancy()?,
            recorded: self.recorded,
        })
    }
}

/// Why an iteration stopped before its requested length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "reason", content = "step")]
pub enum StopReason {
    Completed,
    /// The error box no longer fits in one cell at this step.
    PrecisionExhausted(u64),
    /// Every cell had been visited; requested only with `stop_when_covered`.
    Covered(u64),
}

/// A recorded (forward, or merged two-sided) orbit.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitTrace {
    pub map: ToralMap,
    pub start: TorusPoint,
    pub length: u64,
    pub histogram: CellHistogram,
    pub precision_exhausted_at: Option<u64>,
    pub stop: StopReason,
    /// Steps recorded backwards (under the inverse) for two-sided traces.
    pub backward_recorded: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterateOptions {
    pub steps: u64,
    pub depth: u32,
    pub grid_base: u32,
    pub stop_when_covered: bool,
}

impl IterateOptions {
    pub fn new(steps: u64, depth: u32) -> Self {
        IterateOptions { steps, depth, grid_base: 2, stop_when_covered: false }
    }
}

/// Exact forward iteration with certified cell visits on the dyadic grid.
pub fn iterate(map: &ToralMap, start: &TorusPoint, steps: u64, depth: u32) -> Result<OrbitTrace> {
    iterate_with(map, start, IterateOptions::new(steps, depth))
}

struct Stepper {
    rows: Vec<Vec<BigInt>>,
    pos: Vec<Vec<BigUint>>,
    neg: Vec<Vec<BigUint>>,
    den: BigInt,
}

impl Stepper {
    fn new(map: &ToralMap, den: &BigUint) -> Self {
        let rows: Vec<Vec<BigInt>> = map.entries().iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let part = |neg: bool| -> Vec<Vec<BigUint>> {
            map.entries()
                .iter()
                .map(|r| r.iter().map(|&x| if (x < 0) == neg && x != 0 { BigUint::from(x.unsigned_abs()) } else { BigUint::zero() }).collect())
                .collect()
        };
        Stepper { pos: part(false), neg: part(true), rows, den: BigInt::from(den.clone()) }
    }

    fn apply(&self, a: &[BigUint]) -> Vec<BigUint> {
        self.rows
            .iter()
            .map(|r| {
                let mut s = BigInt::zero();
                for (m, x) in r.iter().zip(a) {
                    if !m.is_zero() {
                        s += m * BigInt::from_biguint(Sign::Plus, x.clone());
                    }
                }
                s.mod_floor(&self.den).to_biguint().expect("nonnegative residue")
            })
            .collect()
    }

    /// Push the box forward; `open` flags say whether each end is excluded.
    fn apply_box(&self, b: &ErrorBox) -> ErrorBox {
        let d = b.lo.len();
        let mut out = ErrorBox { lo: Vec::with_capacity(d), hi: Vec::with_capacity(d), lo_open: vec![false; d], hi_open: vec![false; d] };
        for i in 0..self.rows.len() {
            let (p, q) = (&self.pos[i], &self.neg[i]);
            let mut lo = BigUint::zero();
            let mut hi = BigUint::zero();
            for j in 0..d {
                if !p[j].is_zero() {
                    hi += &p[j] * &b.hi[j];
                    lo += &p[j] * &b.lo[j];
                    out.hi_open[i] |= b.hi_open[j];
                    out.lo_open[i] |= b.lo_open[j];
                }
                if !q[j].is_zero() {
                    hi += &q[j] * &b.lo[j];
                    lo += &q[j] * &b.hi[j];
                    out.hi_open[i] |= b.lo_open[j];
                    out.lo_open[i] |= b.hi_open[j];
                }
            }
            out.lo.push(lo);
            out.hi.push(hi);
        }
        out
    }
}

/// Error box `[a − lo, a + hi]` per axis in units of `1/R`.
#[derive(Clone)]
struct ErrorBox {
    lo: Vec<BigUint>,
    hi: Vec<BigUint>,
    lo_open: Vec<bool>,
    hi_open: Vec<bool>,
}

impl ErrorBox {
    fn for_point(p: &TorusPoint) -> Self {
        let d = p.dim();
        ErrorBox {
            lo: vec![BigUint::zero(); d],
            hi: vec![if p.truncated { BigUint::one() } else { BigUint::zero() }; d],
            lo_open: vec![false; d],
            hi_open: vec![p.truncated; d],
        }
    }

    /// Cell index along axis `i` if the whole box fits in one cell.
    fn cell(&self, i: usize, a: &BigUint, c: &BigInt, den: &BigInt) -> Option<u64> {
        let a = BigInt::from(a.clone());
        // cells are half-open, so an excluded left end lands in the same cell
        let l = ((&a - BigInt::from(self.lo[i].clone())) * c).div_floor(den);
        let right = (&a + BigInt::from(self.hi[i].clone())) * c;
        let r = if self.hi_open[i] { right.div_ceil(den) - 1 } else { right.div_floor(den) };
        if l != r {
            return None;
        }
        l.mod_floor(c).to_u64_digits().1.first().copied().or(Some(0))
    }
}

pub fn iterate_with(map: &ToralMap, start: &TorusPoint, opts: IterateOptions) -> Result<OrbitTrace> {
    let d = map.dim();
    if start.dim() != d {
        return Err(Error::DimensionMismatch(d, start.dim()));
    }
    let mut hist = CellHistogram::new(d, opts.grid_base, opts.depth)?;
    let stepper = Stepper::new(map, &start.denominator);
    let c = BigInt::from(cells_per_axis(opts.grid_base, opts.depth)?);
    let total_cells = hist.cells();
    let mut covered = 0usize;
    let mut a = start.coords.clone();
    let mut errbox = ErrorBox::for_point(start);
    let mut stop = StopReason::Completed;
    let mut idx = vec![0u64; d];
    for n in 0..opts.steps {
        let mut ok = true;
        for i in 0..d {
            match errbox.cell(i, &a[i], &c, &stepper.den) {
                Some(k) => idx[i] = k,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            stop = StopReason::PrecisionExhausted(n);
            break;
        }
        if hist.record(&idx, n) {
            covered += 1;
        }
        if opts.stop_when_covered && covered == total_cells {
            stop = StopReason::Covered(n);
            break;
        }
        if n + 1 < opts.steps {
            a = stepper.apply(&a);
            if start.truncated {
                errbox = stepper.apply_box(&errbox);
            }
        }
    }
    let precision_exhausted_at = match stop {
        StopReason::PrecisionExhausted(n) => Some(n),
        _ => None,
    };
    Ok(OrbitTrace {
        map: map.clone(),
        start: start.clone(),
        length: opts.steps,
        histogram: hist,
        precision_exhausted_at,
        stop,
        backward_recorded: 0,
    })
}

/// Two-sided orbit of an automorphism: forward under the map and under its
/// inverse, merged (the start point counted once). Step labels in
/// `first_visit` are distances from the start in either direction.
pub fn iterate_two_sided(map: &ToralMap, start: &TorusPoint, steps: u64, depth: u32) -> Result<OrbitTrace> {
    let inv = map
        .inverse()
        .ok_or_else(|| Error::InvalidArgument("two-sided orbits need an automorphism".into()))?;
    let fwd = iterate(map, start, steps, depth)?;
    let bwd = iterate(&inv, start, steps, depth)?;
    let mut hist = fwd.histogram.clone();
    for (k, (&v, &f)) in bwd.histogram.visits.iter().zip(&bwd.histogram.first_visit).enumerate() {
        hist.visits[k] += v;
        hist.first_visit[k] = match (hist.first_visit[k], f) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
    // the shared start point was recorded by both passes
    if bwd.histogram.recorded > 0 {
        let c = (hist.grid_base as u64).pow(hist.depth);
        let den = BigUint::from(c);
        let flat = start
            .coords
            .iter()
            .map(|a| (a * &den / &start.denominator).to_u64_digits().first().copied().unwrap_or(0))
            .fold(0u64, |acc, i| acc * c + i) as usize;
        hist.visits[flat] -= 1;
    }
    hist.recorded = hist.visits.iter().sum();
    let exhausted = match (fwd.precision_exhausted_at, bwd.precision_exhausted_at) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(OrbitTrace {
        map: map.clone(),
        start: start.clone(),
        length: steps,
        backward_recorded: bwd.histogram.recorded.saturating_sub(1),
        histogram: hist,
        precision_exhausted_at: exhausted,
        stop: fwd.stop,
    })
}

/// Finite-resolution density report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityVerdict {
    pub epsilon: f64,
    pub grid_depth: u32,
    pub mesh: f64,
    pub cells: u64,
    pub achieved: bool,
    pub first_cover_step: Option<u64>,
    pub empty_cells: u64,
    pub discrepancy: f64,
    pub recorded: u64,
}

pub fn epsilon_dense(trace: &OrbitTrace, epsilon: f64) -> Result<DensityVerdict> {
    trace.histogram.density(epsilon)
}

fn in_ball(ball: &BallSpec, p: &[BigUint], den: &BigUint) -> bool {
    p.iter().all(|a| ball.open_contains(a, den))
}

/// True iff no recorded orbit point lies in the open ball. Points are the
/// exact representatives; on `T^d` the ball is the sup-norm ball around
/// the diagonal point `(c, …, c)`.
pub fn avoid_check(trace: &OrbitTrace, ball: &BallSpec) -> bool {
    first_ball_entry(trace, ball).is_none()
}

/// Step of the first recorded point inside the open ball (negative steps
/// for the backward half of a two-sided trace).
pub fn first_ball_entry(trace: &OrbitTrace, ball: &BallSpec) -> Option<i64> {
    let start = &trace.start;
    let scan = |map: &ToralMap, count: u64, sign: i64| -> Option<i64> {
        let stepper = Stepper::new(map, &start.denominator);
        let mut a = start.coords.clone();
        for n in 0..count {
            if in_ball(ball, &a, &start.denominator) {
                return Some(sign * n as i64);
            }
            if n + 1 < count {
                a = stepper.apply(&a);
            }
        }
        None
    };
    let forward = trace.histogram.recorded - trace.backward_recorded;
    if let Some(s) = scan(&trace.map, forward, 1) {
        return Some(s);
    }
    if trace.backward_recorded > 0 {
        let inv = trace.map.inverse()?;
        return scan(&inv, trace.backward_recorded + 1, -1);
    }
    None
}

/// Exact orbit representatives `x_0, …, x_{n−1}` (for audits and tests).
pub fn orbit_points(map: &ToralMap, start: &TorusPoint, n: u64) -> Result<Vec<TorusPoint>> {
    if start.dim() != map.dim() {
        return Err(Error::DimensionMismatch(map.dim(), start.dim()));
    }
    let stepper = Stepper::new(map, &start.denominator);
    let mut out = Vec::new();
    let mut p = start.clone();
    for k in 0..n {
        out.push(p.clone());
        if k + 1 < n {
            p.coords = stepper.apply(&p.coords);
        }
    }
    Ok(out)
}

/// Base-2 van der Corput sequence as exact points over `2^bits`.
pub fn van_der_corput(n: u64, bits: u32) -> Vec<TorusPoint> {
    (0..n)
        .map(|k| {
            let r = (k.reverse_bits() >> (64 - bits)) as u64;
            TorusPoint {
                denominator: BigUint::one() << bits,
                coords: vec![BigUint::from(r)],
                radix: 2,
                precision: bits,
                truncated: false,
            }
        })
        .collect()
}
