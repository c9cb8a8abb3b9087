//! Avoid-ball sets of `×b` on the circle as subshifts of finite type.
//!
//! A base-`b` word `w` of length `L` names the half-open cylinder
//! `[j·b^{-L}, (j+1)·b^{-L})` with `j` the value of `w`. The inner
//! approximation forbids every cylinder meeting the open ball, so its
//! subshift sits inside the avoid-ball set; the outer one forbids only
//! cylinders inside the closed ball, so its subshift contains it. All
//! boundary decisions are exact rational comparisons.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::approx::{ulp, Approx};
use crate::{Error, Result};

/// Largest `b^L` handled (transfer graphs have `b^L` edges).
pub const MAX_WORDS: u64 = 1 << 22;

/// Exact rational in lowest terms, written `p/q` in files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(pub Ratio<i64>);

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Rational(Ratio::new(num, den)))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    fn parts(&self) -> (i128, i128) {
        (self.numer() as i128, self.denom() as i128)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => Rational::new(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
            None => Rational::new(s.trim().parse().map_err(|_| bad())?, 1),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ball `U = (center − radius, center + radius)` on `ℝ/ℤ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BallRepr", into = "BallRepr")]
pub struct BallSpec {
    center: Rational,
    radius: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BallRepr {
    center: Rational,
    radius: Rational,
}

impl TryFrom<BallRepr> for BallSpec {
    type Error = Error;
    fn try_from(r: BallRepr) -> Result<Self> {
        BallSpec::new(r.center, r.radius)
    }
}

impl From<BallSpec> for BallRepr {
    fn from(b: BallSpec) -> Self {
        BallRepr { center: b.center, radius: b.radius }
    }
}

impl BallSpec {
    /// Center in `[0, 1)`, dyadic radius in `(0, 1/2)`.
    pub fn new(center: Rational, radius: Rational) -> Result<Self> {
        let zero = Rational(Ratio::zero());
        let one = Rational(Ratio::one());
        if center < zero || center >= one {
            return Err(Error::InvalidBall(format!("center {center} outside [0, 1)")));
        }
        if radius <= zero || radius.0 * 2 >= Ratio::one() {
            return Err(Error::InvalidBall(format!("radius {radius} outside (0, 1/2)")));
        }
        if !(radius.denom() as u64).is_power_of_two() {
            return Err(Error::InvalidBall(format!("radius {radius} is not dyadic")));
        }
        Ok(BallSpec { center, radius })
    }

    pub fn from_parts(cn: i64, cd: i64, rn: i64, rd: i64) -> Result<Self> {
        BallSpec::new(Rational::new(cn, cd)?, Rational::new(rn, rd)?)
    }

    pub fn center(&self) -> Rational {
        self.center
    }

    pub fn radius(&self) -> Rational {
        self.radius
    }

    /// The ball unfolded to the real line as `(lo, hi, den)`: the set is
    /// `⋃_k (lo/den + k, hi/den + k)`.
    fn arc(&self) -> (i128, i128, i128) {
        let (cn, cd) = self.center.parts();
        let (rn, rd) = self.radius.parts();
        let den = cd * rd;
        (cn * rd - rn * cd, cn * rd + rn * cd, den)
    }

    /// Does the open ball meet `[num/den, (num+1)/den)`, for a cell of
    /// width `1/den` inside `[0, 1)`?
    pub fn open_meets_cell(&self, j: u64, cells: u64) -> bool {
        let (lo, hi, den) = self.arc();
        let (j, n) = (j as i128, cells as i128);
        // shifted copies k ∈ {−1, 0, 1}: need cell_lo < hi+k and lo+k < cell_hi
        (-1..=1).any(|k: i128| j * den < (hi + k * den) * n && (lo + k * den) * n < (j + 1) * den)
    }

    /// Is `[j/cells, (j+1)/cells)` inside the closed ball?
    pub fn closed_contains_cell(&self, j: u64, cells: u64) -> bool {
        let (lo, hi, den) = self.arc();
        let (j, n) = (j as i128, cells as i128);
        (-1..=1).any(|k: i128| (lo + k * den) * n <= j * den && (j + 1) * den <= (hi + k * den) * n)
    }

    /// Is the exact point `num/den` (in `[0, 1)`) inside the open ball?
    pub fn open_contains(&self, num: &BigUint, den: &BigUint) -> bool {
        use num_bigint::BigInt;
        let (lo, hi, d) = self.arc();
        let x = BigInt::from(num.clone()) * BigInt::from(d);
        let den = BigInt::from(den.clone());
        (-1..=1).any(|k: i128| {
            let l = BigInt::from(lo + k * d) * &den;
            let h = BigInt::from(hi + k * d) * &den;
            l < x && x < h
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Inner,
    Outer,
}

/// A base-`b` subshift given by forbidden words of one fixed length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SftRepr", into = "SftRepr")]
pub struct SftSpec {
    base: u32,
    window: u32,
    /// Values of the forbidden words, sorted.
    forbidden: Vec<u64>,
    polarity: Polarity,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SftRepr {
    base: u32,
    window: u32,
    forbidden: Vec<String>,
    polarity: Polarity,
}

impl TryFrom<SftRepr> for SftSpec {
    type Error = Error;
    fn try_from(r: SftRepr) -> Result<Self> {
        let words = r
            .forbidden
            .iter()
            .map(|w| parse_word(w, r.base, r.window))
            .collect::<Result<Vec<u64>>>()?;
        SftSpec::new(r.base, r.window, words, r.polarity)
    }
}

impl From<SftSpec> for SftRepr {
    fn from(s: SftSpec) -> Self {
        SftRepr {
            base: s.base,
            window: s.window,
            forbidden: s.forbidden.iter().map(|&w| format_word(w, s.base, s.window)).collect(),
            polarity: s.polarity,
        }
    }
}

const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

fn digit_char(d: u8) -> char {
    DIGITS[d as usize] as char
}

fn parse_word(w: &str, base: u32, window: u32) -> Result<u64> {
    if w.chars().count() != window as usize {
        return Err(Error::InvalidArgument(format!("word {w:?} does not have length {window}")));
    }
    w.chars().try_fold(0u64, |acc, ch| {
        let d = ch.to_digit(base).ok_or_else(|| Error::InvalidArgument(format!("bad digit {ch:?} in base {base}")))?;
        Ok(acc * base as u64 + d as u64)
    })
}

pub fn format_word(value: u64, base: u32, len: u32) -> String {
    let mut digits = vec![0u8; len as usize];
    let mut v = value;
    for k in (0..len as usize).rev() {
        digits[k] = (v % base as u64) as u8;
        v /= base as u64;
    }
    digits.iter().map(|&d| digit_char(d)).collect()
}

fn checked_pow(base: u32, exp: u32) -> Result<u64> {
    (base as u64)
        .checked_pow(exp)
        .filter(|&n| n <= MAX_WORDS)
        .ok_or_else(|| Error::InvalidArgument(format!("{base}^{exp} exceeds the word cap {MAX_WORDS}")))
}

impl SftSpec {
    pub fn new(base: u32, window: u32, mut forbidden: Vec<u64>, polarity: Polarity) -> Result<Self> {
        if !(2..=36).contains(&base) {
            return Err(Error::InvalidArgument(format!("base {base} outside 2..=36")));
        }
        if window == 0 {
            return Err(Error::InvalidArgument("window must be at least 1".into()));
        }
        let n = checked_pow(base, window)?;
        if forbidden.iter().any(|&w| w >= n) {
            return Err(Error::InvalidArgument("forbidden word out of range".into()));
        }
        forbidden.sort_unstable();
        forbidden.dedup();
        Ok(SftSpec { base, window, forbidden, polarity })
    }

    /// The full shift (nothing forbidden), window 1.
    pub fn full(base: u32) -> Result<Self> {
        SftSpec::new(base, 1, Vec::new(), Polarity::Inner)
    }

    /// Build from forbidden words written as digit strings (all of one length).
    pub fn from_words(base: u32, words: &[&str], polarity: Polarity) -> Result<Self> {
        let window = words.first().map(|w| w.chars().count() as u32).unwrap_or(1);
        let vals = words.iter().map(|w| parse_word(w, base, window)).collect::<Result<Vec<_>>>()?;
        SftSpec::new(base, window, vals, polarity)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn forbidden(&self) -> &[u64] {
        &self.forbidden
    }

    pub fn forbidden_strings(&self) -> Vec<String> {
        self.forbidden.iter().map(|&w| format_word(w, self.base, self.window)).collect()
    }

    pub fn is_forbidden(&self, word: u64) -> bool {
        self.forbidden.binary_search(&word).is_ok()
    }

    /// True when no length-`window` factor of `digits` is forbidden.
    pub fn is_admissible(&self, digits: &[u8]) -> bool {
        let l = self.window as usize;
        if digits.len() < l {
            return true;
        }
        let n = (self.base as u64).pow(self.window);
        let mut w = 0u64;
        for (i, &d) in digits.iter().enumerate() {
            w = (w * self.base as u64 + d as u64) % n;
            if i + 1 >= l && self.is_forbidden(w) {
                return false;
            }
        }
        true
    }

    /// De Bruijn transfer graph on words of length `window − 1`, with dead
    /// states pruned to a fixpoint.
    pub fn transfer_graph(&self) -> TransferGraph {
        let b = self.base as u64;
        let states = b.pow(self.window - 1);
        let mut succ: Vec<Vec<(u8, u32)>> = vec![Vec::new(); states as usize];
        for u in 0..states {
            for c in 0..b {
                let word = u * b + c;
                if !self.is_forbidden(word) {
                    let v = if states == 1 { 0 } else { word % states };
                    succ[u as usize].push((c as u8, v as u32));
                }
            }
        }
        let mut alive = vec![true; states as usize];
        loop {
            let mut indeg = vec![0u32; states as usize];
            for (u, es) in succ.iter().enumerate() {
                if alive[u] {
                    for &(_, v) in es {
                        if alive[v as usize] {
                            indeg[v as usize] += 1;
                        }
                    }
                }
            }
            let mut changed = false;
            for u in 0..states as usize {
                if !alive[u] {
                    continue;
                }
                let out = succ[u].iter().filter(|&&(_, v)| alive[v as usize]).count();
                if out == 0 || indeg[u] == 0 {
                    alive[u] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for (u, es) in succ.iter_mut().enumerate() {
            if alive[u] {
                es.retain(|&(_, v)| alive[v as usize]);
            } else {
                es.clear();
            }
        }
        TransferGraph { base: self.base, state_len: self.window - 1, succ, alive }
    }
}

/// Exact avoid-ball SFT approximations `(inner, outer)` at word length `window`.
pub fn avoid_ball_sft(base: u32, ball: &BallSpec, window: u32) -> Result<(SftSpec, SftSpec)> {
    if base < 2 {
        return Err(Error::InvalidArgument(format!("base {base} < 2")));
    }
    if window == 0 {
        return Err(Error::InvalidArgument("window must be at least 1".into()));
    }
    let n = checked_pow(base, window)?;
    // a cylinder must fit the ball's diameter: b^{-L} ≤ 2·radius
    let r = ball.radius();
    if (r.denom() as i128) > 2 * (r.numer() as i128) * (n as i128) {
        return Err(Error::WindowTooCoarse { cylinder: 1.0 / n as f64, radius: r.to_f64() });
    }
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for j in 0..n {
        if ball.open_meets_cell(j, n) {
            inner.push(j);
        }
        if ball.closed_contains_cell(j, n) {
            outer.push(j);
        }
    }
    Ok((SftSpec::new(base, window, inner, Polarity::Inner)?, SftSpec::new(base, window, outer, Polarity::Outer)?))
}

/// Pruned de Bruijn graph: state `u` is a word of length `state_len`;
/// edges carry the appended symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferGraph {
    pub base: u32,
    pub state_len: u32,
    pub succ: Vec<Vec<(u8, u32)>>,
    pub alive: Vec<bool>,
}

impl TransferGraph {
    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    /// Strongly connected components among alive states that carry at least
    /// one internal edge (iterative Tarjan).
    pub fn recurrent_components(&self) -> Vec<Vec<u32>> {
        let n = self.succ.len();
        let mut index = vec![u32::MAX; n];
        let mut low = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        let mut comps = Vec::new();
        let mut next = 0u32;
        let mut call: Vec<(u32, usize)> = Vec::new();
        for root in 0..n {
            if !self.alive[root] || index[root] != u32::MAX {
                continue;
            }
            call.push((root as u32, 0));
            while let Some(&mut (v, ref mut ei)) = call.last_mut() {
                let vu = v as usize;
                if *ei == 0 && index[vu] == u32::MAX {
                    index[vu] = next;
                    low[vu] = next;
                    next += 1;
                    stack.push(v);
                    on_stack[vu] = true;
                }
                if *ei < self.succ[vu].len() {
                    let w = self.succ[vu][*ei].1 as usize;
                    *ei += 1;
                    if index[w] == u32::MAX {
                        call.push((w as u32, 0));
                    } else if on_stack[w] {
                        low[vu] = low[vu].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(p, _)) = call.last() {
                        low[p as usize] = low[p as usize].min(low[vu]);
                    }
                    if low[vu] == index[vu] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w as usize] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        let internal = comp.len() > 1 || self.succ[vu].iter().any(|&(_, w)| w == v);
                        if internal {
                            comps.push(comp);
                        }
                    }
                }
            }
        }
        comps.sort();
        comps
    }
}

/// Perron data of the principal (largest spectral radius, then lowest
/// state) recurrent component of an SFT's transfer graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronData {
    pub base: u32,
    /// Certified enclosure of the spectral radius of the whole transfer matrix.
    pub spectral_radius: Approx,
    /// States (word values) of the principal component.
    pub component: Vec<u32>,
    /// Right Perron vector on `component`, max-normalized.
    pub right_vector: Vec<f64>,
    /// Left Perron vector on `component`, max-normalized.
    pub left_vector: Vec<f64>,
    /// `‖A·v − ρ·v‖_∞` bound for both vectors (ρ the midpoint).
    pub vector_error: f64,
    pub entropy: Approx,
    pub dimension: Approx,
    pub alive_states: usize,
    pub min_row_sum: u32,
    pub max_row_sum: u32,
    pub iterations: u64,
}

struct ComponentPerron {
    lo: f64,
    hi: f64,
    right: Vec<f64>,
    left: Vec<f64>,
    residual: f64,
    iterations: u64,
    min_row: u32,
    max_row: u32,
}

const MAX_ITERATIONS: u64 = 2_000_000;

/// Power iteration on `A + I` (primitive on an irreducible component) with
/// Collatz–Wielandt bounds `min (Av)_i/v_i ≤ ρ ≤ max (Av)_i/v_i` on `A`.
fn component_perron(graph: &TransferGraph, comp: &[u32], tolerance: f64) -> Result<ComponentPerron> {
    let k = comp.len();
    let mut pos = alloc::collections::BTreeMap::new();
    for (i, &s) in comp.iter().enumerate() {
        pos.insert(s, i as u32);
    }
    // local adjacency (edges leaving the component are dropped)
    let local: Vec<Vec<u32>> = comp
        .iter()
        .map(|&s| graph.succ[s as usize].iter().filter_map(|&(_, w)| pos.get(&w).copied()).collect())
        .collect();
    let mut pred: Vec<Vec<u32>> = vec![Vec::new(); k];
    for (i, es) in local.iter().enumerate() {
        for &j in es {
            pred[j as usize].push(i as u32);
        }
    }
    let min_row = local.iter().map(|e| e.len() as u32).min().unwrap_or(0);
    let max_row = local.iter().map(|e| e.len() as u32).max().unwrap_or(0);
    if min_row == max_row {
        // constant row sums: ρ is exact and the ones vector is a right eigenvector
        let left = power_vector(&pred, k, tolerance, max_row as f64)?;
        return Ok(ComponentPerron {
            lo: max_row as f64,
            hi: max_row as f64,
            right: vec![1.0; k],
            residual: left.1.max(0.0),
            left: left.0,
            iterations: left.2,
            min_row,
            max_row,
        });
    }
    let (right, r_res, r_it, lo, hi) = power_bracket(&local, k, tolerance)?;
    let (left, l_res, l_it) = power_vector(&pred, k, tolerance, 0.5 * (lo + hi))?;
    Ok(ComponentPerron {
        lo,
        hi,
        right,
        left,
        residual: r_res.max(l_res),
        iterations: r_it + l_it,
        min_row,
        max_row,
    })
}

fn apply(adj: &[Vec<u32>], v: &[f64], out: &mut [f64]) {
    for (i, es) in adj.iter().enumerate() {
        out[i] = es.iter().map(|&j| v[j as usize]).sum();
    }
}

fn normalize_max(v: &mut [f64]) {
    let m = v.iter().cloned().fold(0.0, f64::max);
    if m > 0.0 {
        for x in v.iter_mut() {
            *x /= m;
        }
    }
}

/// Returns (vector, residual, iterations, lo, hi).
fn power_bracket(adj: &[Vec<u32>], k: usize, tolerance: f64) -> Result<(Vec<f64>, f64, u64, f64, f64)> {
    let mut v = vec![1.0; k];
    let mut av = vec![0.0; k];
    let max_deg = adj.iter().map(|e| e.len()).max().unwrap_or(1) as f64;
    let widen = (max_deg + 4.0) * f64::EPSILON;
    let mut it = 0u64;
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    while it < MAX_ITERATIONS {
        apply(adj, &v, &mut av);
        let mut l = f64::INFINITY;
        let mut h = 0.0f64;
        for i in 0..k {
            let r = av[i] / v[i];
            l = l.min(r);
            h = h.max(r);
        }
        lo = f64::max(lo, l * (1.0 - widen));
        hi = f64::min(hi, h * (1.0 + widen));
        let floor = hi * 64.0 * f64::EPSILON;
        if hi - lo <= tolerance.max(floor) {
            let rho = 0.5 * (lo + hi);
            let res = (0..k).map(|i| (av[i] - rho * v[i]).abs()).fold(0.0, f64::max);
            return Ok((v, res, it, lo, hi));
        }
        for i in 0..k {
            v[i] += av[i];
        }
        normalize_max(&mut v);
        if v.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
            break;
        }
        it += 1;
    }
    Err(Error::NotConverged { tolerance, width: hi - lo })
}

/// Power iteration for an eigenvector when the eigenvalue is known.
fn power_vector(adj: &[Vec<u32>], k: usize, tolerance: f64, rho: f64) -> Result<(Vec<f64>, f64, u64)> {
    let (v, res, it, _, _) = power_bracket(adj, k, tolerance.max(rho * 1e-15))?;
    Ok((v, res, it))
}

/// Certified Perron data of the SFT, with the spectral-radius bracket
/// narrowed to `tolerance`.
pub fn perron(spec: &SftSpec, tolerance: f64) -> Result<PerronData> {
    let graph = spec.transfer_graph();
    let alive = graph.alive_count();
    if alive == 0 {
        return Err(Error::EmptyShift);
    }
    let comps = graph.recurrent_components();
    if comps.is_empty() {
        return Err(Error::EmptyShift);
    }
    let mut best: Option<(usize, ComponentPerron)> = None;
    let mut lo_all = 0.0f64;
    let mut hi_all = 0.0f64;
    for (ci, comp) in comps.iter().enumerate() {
        let cp = component_perron(&graph, comp, tolerance)?;
        lo_all = lo_all.max(cp.lo);
        hi_all = hi_all.max(cp.hi);
        let better = match &best {
            None => true,
            Some((_, b)) => cp.lo + cp.hi > b.lo + b.hi + tolerance,
        };
        if better {
            best = Some((ci, cp));
        }
    }
    let (ci, cp) = best.expect("nonempty components");
    let rho = Approx::new(0.5 * (lo_all + hi_all), 0.5 * (hi_all - lo_all));
    let log_b = libm::log(spec.base as f64);
    let entropy = log_approx(rho);
    let dim_v = (entropy.value / log_b).clamp(0.0, 1.0);
    let dimension = Approx::new(dim_v, entropy.error_radius / log_b + ulp(dim_v));
    Ok(PerronData {
        base: spec.base,
        spectral_radius: rho,
        component: comps[ci].clone(),
        right_vector: cp.right,
        left_vector: cp.left,
        vector_error: cp.residual,
        entropy,
        dimension,
        alive_states: alive,
        min_row_sum: cp.min_row,
        max_row_sum: cp.max_row,
        iterations: cp.iterations,
    })
}

fn log_approx(x: Approx) -> Approx {
    let v = libm::log(x.value);
    let lo = x.lo().max(f64::MIN_POSITIVE);
    let r = (libm::log(x.hi()) - v).max(v - libm::log(lo));
    Approx::new(v, r + 2.0 * ulp(v))
}

/// A finite digit expansion `0.d_1 d_2 … d_N` in base `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitWord {
    pub base: u32,
    pub digits: Vec<u8>,
}

impl DigitWord {
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Numerator `Σ d_i b^{N−i}` of the exact value over `b^N`.
    pub fn numerator(&self) -> BigUint {
        let b = BigUint::from(self.base);
        self.digits.iter().fold(BigUint::zero(), |acc, &d| acc * &b + BigUint::from(d))
    }

    pub fn to_f64(&self) -> f64 {
        let mut x = 0.0;
        let b = self.base as f64;
        for &d in self.digits.iter().take(64).rev() {
            x = (x + d as f64) / b;
        }
        x
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            write!(f, "{}", digit_char(d))?;
        }
        Ok(())
    }
}

/// Markov chain of the Parry measure on the principal component.
#[derive(Debug, Clone)]
pub struct ParryChain {
    base: u32,
    state_len: u32,
    states: Vec<u32>,
    /// Per local state: cumulative probabilities and (symbol, next local state).
    transitions: Vec<Vec<(f64, u8, u32)>>,
    stationary_cdf: Vec<f64>,
}

impl ParryChain {
    /// `p(i→j) = A_ij v_j / (ρ v_i)`, rows renormalized against rounding.
    pub fn new(spec: &SftSpec, perron: &PerronData) -> Result<Self> {
        let graph = spec.transfer_graph();
        let comp = &perron.component;
        if comp.is_empty() || perron.right_vector.len() != comp.len() || perron.base != spec.base {
            return Err(Error::DegenerateShift);
        }
        let mut pos = alloc::collections::BTreeMap::new();
        for (i, &s) in comp.iter().enumerate() {
            pos.insert(s, i as u32);
        }
        let v = &perron.right_vector;
        let u = &perron.left_vector;
        let mut transitions = Vec::with_capacity(comp.len());
        for (i, &s) in comp.iter().enumerate() {
            let mut row = Vec::new();
            let mut total = 0.0;
            for &(sym, w) in &graph.succ[s as usize] {
                if let Some(&j) = pos.get(&w) {
                    total += v[j as usize];
                    row.push((total, sym, j));
                }
            }
            if row.is_empty() || total <= 0.0 || v[i] <= 0.0 {
                return Err(Error::DegenerateShift);
            }
            for e in row.iter_mut() {
                e.0 /= total;
            }
            row.last_mut().expect("nonempty").0 = 1.0;
            transitions.push(row);
        }
        let mut cdf = Vec::with_capacity(comp.len());
        let mut acc = 0.0;
        for i in 0..comp.len() {
            acc += u[i] * v[i];
            cdf.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::DegenerateShift);
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        *cdf.last_mut().expect("nonempty") = 1.0;
        Ok(ParryChain { base: spec.base, state_len: graph.state_len, states: comp.clone(), transitions, stationary_cdf: cdf })
    }

    /// Transition probabilities out of the component state with word value `state`.
    pub fn probabilities(&self, state: u32) -> Vec<(u8, u32, f64)> {
        let Ok(i) = self.states.binary_search(&state) else { return Vec::new() };
        let mut prev = 0.0;
        self.transitions[i]
            .iter()
            .map(|&(c, sym, j)| {
                let p = c - prev;
                prev = c;
                (sym, self.states[j as usize], p)
            })
            .collect()
    }

    /// Deterministic sample of `length` digits for `(seed, stream)`.
    pub fn sample(&self, length: usize, seed: u64, stream: u64) -> DigitWord {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut draw = || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let x = draw();
        let mut cur = self.stationary_cdf.iter().position(|&c| x < c).unwrap_or(self.states.len() - 1);
        let mut digits = Vec::with_capacity(length);
        let prefix = format_word(self.states[cur] as u64, self.base, self.state_len);
        for ch in prefix.chars().take(length) {
            digits.push(ch.to_digit(self.base).expect("own digit") as u8);
        }
        while digits.len() < length {
            let x = draw();
            let row = &self.transitions[cur];
            let k = row.iter().position(|e| x < e.0).unwrap_or(row.len() - 1);
            digits.push(row[k].1);
            cur = row[k].2 as usize;
        }
        DigitWord { base: self.base, digits }
    }
}

/// Sample a Parry-typical admissible word of the given length.
pub fn parry_sample(spec: &SftSpec, perron: &PerronData, length: usize, seed: u64) -> Result<DigitWord> {
    Ok(ParryChain::new(spec, perron)?.sample(length, seed, 0))
}

/// Parry measure of every length-`depth` cylinder (indexed by word value).
pub fn parry_cylinder_measure(spec: &SftSpec, perron: &PerronData, depth: u32) -> Result<Vec<f64>> {
    let graph = spec.transfer_graph();
    let b = spec.base as u64;
    let sl = graph.state_len;
    let n = checked_pow(spec.base, depth.max(sl))?;
    let comp = &perron.component;
    let mut pos = alloc::collections::BTreeMap::new();
    for (i, &s) in comp.iter().enumerate() {
        pos.insert(s as u64, i);
    }
    let norm: f64 = perron.left_vector.iter().zip(&perron.right_vector).map(|(u, v)| u * v).sum();
    let rho = perron.spectral_radius.value;
    let m = depth.max(sl);
    let states = b.pow(sl);
    let mut weights = vec![0.0; n as usize];
    for w in 0..n {
        // states visited: successive windows of length sl
        let first = w / b.pow(m - sl);
        let last = w % states.max(1);
        let (Some(&i), Some(&j)) = (pos.get(&first), pos.get(&if sl == 0 { 0 } else { last })) else { continue };
        // every intermediate length-(sl+1) factor must be an internal edge
        let digits = format_word(w, spec.base, m);
        let ds: Vec<u8> = digits.chars().map(|c| c.to_digit(spec.base).expect("digit") as u8).collect();
        if !spec.is_admissible(&ds) {
            continue;
        }
        let mut ok = true;
        let mut s = first;
        for &d in &ds[sl as usize..] {
            let next = if sl == 0 { 0 } else { (s * b + d as u64) % states };
            if !pos.contains_key(&next) {
                ok = false;
                break;
            }
            s = next;
        }
        if !ok {
            continue;
        }
        let steps = (m - sl) as i32;
        weights[w as usize] = perron.left_vector[i] * perron.right_vector[j] / norm / libm::pow(rho, steps as f64);
    }
    if depth < sl {
        let agg = b.pow(sl - depth);
        let mut coarse = vec![0.0; b.pow(depth) as usize];
        for (w, x) in weights.iter().enumerate() {
            coarse[w / agg as usize] += x;
        }
        return Ok(coarse);
    }
    Ok(weights)
}

/// Collect the distinct admissible words of `length` (for small enumerations).
pub fn admissible_words(spec: &SftSpec, length: u32) -> Result<BTreeSet<u64>> {
    let n = checked_pow(spec.base, length)?;
    let mut out = BTreeSet::new();
    for w in 0..n {
        let s = format_word(w, spec.base, length);
        let ds: Vec<u8> = s.chars().map(|c| c.to_digit(spec.base).expect("digit") as u8).collect();
        if spec.is_admissible(&ds) {
            out.insert(w);
        }
    }
    Ok(out)
}

impl fmt::Display for SftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "base {} window {} forbidding {{{}}}", self.base, self.window, self.forbidden_strings().join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> SftSpec {
        SftSpec::from_words(2, &["11"], Polarity::Inner).unwrap()
    }

    #[test]
    fn centered_ball_at_zero() {
        let ball = BallSpec::from_parts(0, 1, 1, 4).unwrap();
        let (inner, outer) = avoid_ball_sft(2, &ball, 2).unwrap();
        assert_eq!(inner.forbidden_strings(), ["00", "11"]);
        assert_eq!(outer.forbidden_strings(), ["00", "11"]);
    }

    #[test]
    fn one_sided_ball_gives_golden_mean() {
        let ball = BallSpec::from_parts(7, 8, 1, 8).unwrap();
        let (inner, outer) = avoid_ball_sft(2, &ball, 2).unwrap();
        assert_eq!(inner.forbidden_strings(), ["11"]);
        assert_eq!(outer.forbidden_strings(), ["11"]);
    }

    #[test]
    fn degenerate_and_coarse_balls() {
        assert!(matches!(BallSpec::from_parts(1, 3, 0, 1), Err(Error::InvalidBall(_))));
        let ball = BallSpec::from_parts(1, 3, 1, 64).unwrap();
        assert!(matches!(avoid_ball_sft(3, &ball, 2), Err(Error::WindowTooCoarse { .. })));
        assert!(avoid_ball_sft(3, &ball, 4).is_ok());
    }

    #[test]
    fn inner_forbids_more_than_outer() {
        let ball = BallSpec::from_parts(1, 3, 1, 16).unwrap();
        let (inner, outer) = avoid_ball_sft(2, &ball, 6).unwrap();
        for w in outer.forbidden() {
            assert!(inner.is_forbidden(*w));
        }
        assert!(inner.forbidden().len() > outer.forbidden().len());
    }

    #[test]
    fn perron_golden_mean() {
        let p = perron(&golden(), 1e-13).unwrap();
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        assert!(p.spectral_radius.contains(phi, 1e-15));
        assert!((p.dimension.value - libm::log(phi) / libm::log(2.0)).abs() < 1e-12);
        assert!(p.min_row_sum as f64 <= p.spectral_radius.hi() && p.spectral_radius.lo() <= p.max_row_sum as f64);
    }

    #[test]
    fn perron_full_and_permutation() {
        let full = perron(&SftSpec::full(2).unwrap(), 1e-13).unwrap();
        assert_eq!(full.spectral_radius.value, 2.0);
        assert_eq!(full.dimension.value, 1.0);
        let alt = SftSpec::from_words(2, &["00", "11"], Polarity::Inner).unwrap();
        let p = perron(&alt, 1e-13).unwrap();
        assert!(p.spectral_radius.contains(1.0, 1e-15));
        assert_eq!(p.dimension.value, 0.0);
    }

    #[test]
    fn empty_shift() {
        let all = SftSpec::from_words(2, &["0", "1"], Polarity::Inner).unwrap();
        assert_eq!(perron(&all, 1e-12).unwrap_err(), Error::EmptyShift);
    }

    #[test]
    fn alternating_sample_is_deterministic() {
        let alt = SftSpec::from_words(2, &["00", "11"], Polarity::Inner).unwrap();
        let p = perron(&alt, 1e-13).unwrap();
        let w = parry_sample(&alt, &p, 20, 7).unwrap();
        assert!(w.digits.windows(2).all(|x| x[0] != x[1]));
    }

    #[test]
    fn samples_are_admissible_and_seeded() {
        let g = golden();
        let p = perron(&g, 1e-13).unwrap();
        let a = parry_sample(&g, &p, 500, 1).unwrap();
        let b = parry_sample(&g, &p, 500, 1).unwrap();
        let c = parry_sample(&g, &p, 500, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(g.is_admissible(&a.digits));
        // prefix consistency: a longer sample extends a shorter one
        let short = parry_sample(&g, &p, 100, 1).unwrap();
        assert_eq!(&a.digits[..100], &short.digits[..]);
    }

    #[test]
    fn cylinder_measure_sums_to_one() {
        let g = golden();
        let p = perron(&g, 1e-13).unwrap();
        for depth in [1, 2, 5, 8] {
            let w = parry_cylinder_measure(&g, &p, depth).unwrap();
            let s: f64 = w.iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "depth {depth}: {s}");
        }
        let w1 = parry_cylinder_measure(&g, &p, 1).unwrap();
        assert!((w1[1] - (5.0 - libm::sqrt(5.0)) / 10.0).abs() < 1e-12);
    }

    #[test]
    fn serde_shape() {
        let g = golden();
        let r: SftRepr = g.clone().into();
        assert_eq!(r.forbidden, ["11"]);
        assert_eq!(SftSpec::try_from(r).unwrap(), g);
        assert_eq!("7/8".parse::<Rational>().unwrap(), Rational::new(7, 8).unwrap());
    }
}
