//! Measures on the `g^m`-adic grid of `T^d`, their push-forwards, Cesàro
//! averages and distance to the uniform measure.
//!
//! A grid measure is read as a density that is constant on each cell. The
//! push-forward of a cell is split over target cells in proportion to the
//! exact overlap of its image with them. For `x ↦ kx` on the circle, and
//! for monomial matrices, the image of a cell is a union of whole cells;
//! for general 2-D matrices the image parallelogram is clipped against
//! the grid in exact rational arithmetic.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::spectral::ToralMap;
use crate::symbolic::{parry_cylinder_measure, PerronData, SftSpec};
use crate::{Error, Result};

/// Tolerance on total mass.
pub const MASS_TOLERANCE: f64 = 1e-12;

const MAX_CELLS: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeasure {
    pub dim: usize,
    pub base: u32,
    pub depth: u32,
    /// Cell weights, axis 0 most significant.
    pub weights: Vec<f64>,
}

impl GridMeasure {
    pub fn new(dim: usize, base: u32, depth: u32, weights: Vec<f64>) -> Result<Self> {
        let n = Self::cell_count(dim, base, depth)?;
        if weights.len() as u64 != n {
            return Err(Error::IncompatibleGrid(format!("{} weights for {n} cells", weights.len())));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        Ok(GridMeasure { dim, base, depth, weights })
    }

    fn cell_count(dim: usize, base: u32, depth: u32) -> Result<u64> {
        if base < 2 || dim == 0 {
            return Err(Error::IncompatibleGrid("grid needs base ≥ 2 and dimension ≥ 1".into()));
        }
        (base as u64)
            .checked_pow(depth)
            .and_then(|c| c.checked_pow(dim as u32))
            .filter(|&n| n <= MAX_CELLS)
            .ok_or_else(|| Error::IncompatibleGrid(format!("{base}^({depth}·{dim}) cells exceed {MAX_CELLS}")))
    }

    pub fn uniform(dim: usize, base: u32, depth: u32) -> Result<Self> {
        let n = Self::cell_count(dim, base, depth)?;
        Ok(GridMeasure { dim, base, depth, weights: vec![1.0 / n as f64; n as usize] })
    }

    pub fn point_mass(dim: usize, base: u32, depth: u32, cell: usize) -> Result<Self> {
        let n = Self::cell_count(dim, base, depth)? as usize;
        if cell >= n {
            return Err(Error::InvalidArgument(format!("cell {cell} out of {n}")));
        }
        let mut weights = vec![0.0; n];
        weights[cell] = 1.0;
        Ok(GridMeasure { dim, base, depth, weights })
    }

    /// The Parry measure of an SFT on the base-`b` grid of the circle.
    pub fn parry(spec: &SftSpec, perron: &PerronData, depth: u32) -> Result<Self> {
        let w = parry_cylinder_measure(spec, perron, depth)?;
        let total: f64 = w.iter().sum();
        GridMeasure::new(1, spec.base(), depth, w.into_iter().map(|x| x / total).collect())
    }

    pub fn cells_per_axis(&self) -> u64 {
        (self.base as u64).pow(self.depth)
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Aggregate to depth `k ≤ depth`.
    pub fn coarsen(&self, k: u32) -> Result<GridMeasure> {
        if k > self.depth {
            return Err(Error::IncompatibleGrid(format!("cannot refine depth {} to {k}", self.depth)));
        }
        let g = self.base as u64;
        let fine = g.pow(self.depth);
        let coarse = g.pow(k);
        let ratio = g.pow(self.depth - k);
        let mut out = vec![0.0; coarse.pow(self.dim as u32) as usize];
        for (flat, &w) in self.weights.iter().enumerate() {
            let mut rest = flat as u64;
            let mut target = 0u64;
            let mut place = 1u64;
            for _ in 0..self.dim {
                target += (rest % fine / ratio) * place;
                rest /= fine;
                place *= coarse;
            }
            out[target as usize] += w;
        }
        Ok(GridMeasure { dim: self.dim, base: self.base, depth: k, weights: out })
    }
}

/// A map is monomial when each row and column has one nonzero entry.
fn monomial(map: &ToralMap) -> Option<Vec<(usize, i64)>> {
    let d = map.dim();
    let mut out = Vec::with_capacity(d);
    let mut used = vec![false; d];
    for row in map.entries() {
        let nz: Vec<(usize, i64)> = row.iter().copied().enumerate().filter(|&(_, x)| x != 0).collect();
        if nz.len() != 1 || used[nz[0].0] {
            return None;
        }
        used[nz[0].0] = true;
        out.push(nz[0]);
    }
    Some(out)
}

/// Exact grid push-forward.
pub fn pushforward(measure: &GridMeasure, map: &ToralMap) -> Result<GridMeasure> {
    if map.dim() != measure.dim {
        return Err(Error::DimensionMismatch(measure.dim, map.dim()));
    }
    if map.det().is_zero() {
        return Err(Error::IncompatibleGrid("singular maps have no cell decomposition".into()));
    }
    if let Some(mono) = monomial(map) {
        return Ok(push_monomial(measure, &mono));
    }
    if measure.dim == 2 {
        return push_planar(measure, map);
    }
    Err(Error::IncompatibleGrid(format!(
        "{}-dimensional non-monomial maps are not cell-compatible on this grid",
        measure.dim
    )))
}

/// Row `i` of the map is `k_i·x_{j_i}`: a cell box maps onto a product of
/// `|k_i|`-cell runs.
fn push_monomial(measure: &GridMeasure, mono: &[(usize, i64)]) -> GridMeasure {
    let d = measure.dim;
    let c = measure.cells_per_axis() as i64;
    let share = 1.0 / mono.iter().map(|&(_, k)| k.unsigned_abs() as f64).product::<f64>();
    let mut out = vec![0.0; measure.weights.len()];
    let mut src = vec![0i64; d];
    let mut runs: Vec<(i64, i64)> = vec![(0, 0); d];
    let mut cursor = vec![0i64; d];
    for (flat, &w) in measure.weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let mut rest = flat as i64;
        for axis in (0..d).rev() {
            src[axis] = rest % c;
            rest /= c;
        }
        for (i, &(j, k)) in mono.iter().enumerate() {
            // image of [s, s+1) under ×k starts at k·s (k > 0) or k·(s+1) (k < 0)
            let start = if k > 0 { k * src[j] } else { k * (src[j] + 1) };
            runs[i] = (start, k.abs());
            cursor[i] = 0;
        }
        let piece = w * share;
        loop {
            let mut target = 0i64;
            for i in 0..d {
                target = target * c + (runs[i].0 + cursor[i]).rem_euclid(c);
            }
            out[target as usize] += piece;
            let mut axis = d;
            loop {
                if axis == 0 {
                    break;
                }
                axis -= 1;
                cursor[axis] += 1;
                if cursor[axis] < runs[axis].1 {
                    break;
                }
                cursor[axis] = 0;
                if axis == 0 {
                    axis = usize::MAX;
                    break;
                }
            }
            if axis == usize::MAX {
                break;
            }
        }
    }
    GridMeasure { dim: d, base: measure.base, depth: measure.depth, weights: out }
}

type Q = Ratio<i64>;

fn clip(poly: &[(Q, Q)], axis: usize, bound: Q, keep_above: bool) -> Vec<(Q, Q)> {
    let coord = |p: &(Q, Q)| if axis == 0 { p.0 } else { p.1 };
    let inside = |p: &(Q, Q)| if keep_above { coord(p) >= bound } else { coord(p) <= bound };
    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (ia, ib) = (inside(&a), inside(&b));
        if ia {
            out.push(a);
        }
        if ia != ib {
            let t = (bound - coord(&a)) / (coord(&b) - coord(&a));
            out.push((a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t));
        }
    }
    out
}

fn area(poly: &[(Q, Q)]) -> Q {
    let mut s = Q::zero();
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        s += a.0 * b.1 - b.0 * a.1;
    }
    (s / 2).abs()
}

/// Overlap fractions of the image of the unit cell at the origin with the
/// integer grid, as `((dx, dy), fraction)` offsets from the image of the
/// cell corner. The pattern is the same for every source cell.
fn planar_stencil(m: &[Vec<i64>]) -> Vec<((i64, i64), Q)> {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let corners = [(0i64, 0i64), (a, c), (a + b, c + d), (b, d)];
    let poly: Vec<(Q, Q)> = corners.iter().map(|&(x, y)| (Q::from_integer(x), Q::from_integer(y))).collect();
    let xs = corners.iter().map(|p| p.0);
    let ys = corners.iter().map(|p| p.1);
    let (x0, x1) = (xs.clone().min().unwrap_or(0), xs.max().unwrap_or(0));
    let (y0, y1) = (ys.clone().min().unwrap_or(0), ys.max().unwrap_or(0));
    let total = area(&poly);
    let mut out = Vec::new();
    for gx in x0..x1 {
        let strip = clip(&clip(&poly, 0, Q::from_integer(gx), true), 0, Q::from_integer(gx + 1), false);
        if strip.len() < 3 {
            continue;
        }
        for gy in y0..y1 {
            let cell = clip(&clip(&strip, 1, Q::from_integer(gy), true), 1, Q::from_integer(gy + 1), false);
            if cell.len() < 3 {
                continue;
            }
            let f = area(&cell) / total;
            if !f.is_zero() {
                out.push(((gx, gy), f));
            }
        }
    }
    out
}

fn push_planar(measure: &GridMeasure, map: &ToralMap) -> Result<GridMeasure> {
    let m = map.entries();
    let stencil = planar_stencil(m);
    let check: Q = stencil.iter().map(|s| s.1).sum();
    if check != Q::from_integer(1) {
        return Err(Error::IncompatibleGrid("overlap fractions do not sum to 1".into()));
    }
    let weights: Vec<((i64, i64), f64)> =
        stencil.iter().map(|&(o, f)| (o, f.to_f64().unwrap_or(0.0))).collect();
    let c = measure.cells_per_axis() as i64;
    let mut out = vec![0.0; measure.weights.len()];
    for (flat, &w) in measure.weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let (i, j) = (flat as i64 / c, flat as i64 % c);
        // cell (i, j) has corner (i, j) in cell units; its image corner is M·(i, j)
        let x = m[0][0] * i + m[0][1] * j;
        let y = m[1][0] * i + m[1][1] * j;
        for &((dx, dy), f) in &weights {
            let t = (x + dx).rem_euclid(c) * c + (y + dy).rem_euclid(c);
            out[t as usize] += w * f;
        }
    }
    Ok(GridMeasure { dim: 2, base: measure.base, depth: measure.depth, weights: out })
}

/// `(1/N) Σ_{n<N} S^n_* ν`.
pub fn cesaro_average(initial: &GridMeasure, map: &ToralMap, n: u64) -> Result<GridMeasure> {
    if n == 0 {
        return Err(Error::InvalidArgument("Cesàro average needs N ≥ 1".into()));
    }
    let mut curve = cesaro_checkpoints(initial, map, &[n])?;
    Ok(curve.pop().expect("one checkpoint").1)
}

/// Cesàro averages at each requested `N` (ascending), from one pass.
pub fn cesaro_checkpoints(initial: &GridMeasure, map: &ToralMap, ns: &[u64]) -> Result<Vec<(u64, GridMeasure)>> {
    let mut sorted = ns.to_vec();
    sorted.sort_unstable();
    if sorted.first() == Some(&0) {
        return Err(Error::InvalidArgument("Cesàro average needs N ≥ 1".into()));
    }
    let mut out = Vec::with_capacity(sorted.len());
    let mut sum = vec![0.0; initial.weights.len()];
    let mut cur = initial.clone();
    let mut next = 0;
    let last = sorted.last().copied().unwrap_or(0);
    for k in 1..=last {
        for (s, w) in sum.iter_mut().zip(&cur.weights) {
            *s += w;
        }
        while next < sorted.len() && sorted[next] == k {
            let weights = sum.iter().map(|s| s / k as f64).collect();
            out.push((k, GridMeasure { weights, ..initial.clone() }));
            next += 1;
        }
        if k < last {
            cur = pushforward(&cur, map)?;
        }
    }
    Ok(out)
}

/// Total variation and largest single-cell deviation from uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformDistance {
    pub total_variation: f64,
    pub max_cell_deviation: f64,
}

pub fn distance_to_uniform(measure: &GridMeasure) -> UniformDistance {
    let u = 1.0 / measure.weights.len() as f64;
    let mut tv = 0.0;
    let mut worst = 0.0f64;
    for &w in &measure.weights {
        let dev = (w - u).abs();
        tv += dev;
        worst = worst.max(dev);
    }
    UniformDistance { total_variation: tv / 2.0, max_cell_deviation: worst }
}
