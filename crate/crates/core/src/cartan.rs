//! Root-system entropy of Cartan elements for products of `sl_n`, and the
//! rank and independence checks on pairs of elements.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bounds::{ly_min_unstable_dim, marstrand_combine, prop24_bound, LyAllocation, LyapunovSpectrum};
use crate::{Error, Result};

/// Root values below this (relative to the element's size) count as zero.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// One simple factor `sl_n`; every root space has `root_multiplicity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimpleFactor {
    pub n: usize,
    #[serde(default = "one")]
    pub root_multiplicity: usize,
}

fn one() -> usize {
    1
}

impl SimpleFactor {
    pub fn sl(n: usize) -> Self {
        SimpleFactor { n, root_multiplicity: 1 }
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }

    pub fn dim(&self) -> usize {
        self.rank() + self.root_multiplicity * self.n * (self.n - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootSystemSpec {
    pub factors: Vec<SimpleFactor>,
}

impl RootSystemSpec {
    pub fn new(factors: Vec<SimpleFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("a root system needs at least one factor".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.n < 2 || f.root_multiplicity == 0 {
                return Err(Error::InvalidArgument(format!("factor {i}: sl_{} with multiplicity {}", f.n, f.root_multiplicity)));
            }
        }
        Ok(RootSystemSpec { factors })
    }

    pub fn sl(ns: &[usize]) -> Result<Self> {
        Self::new(ns.iter().map(|&n| SimpleFactor::sl(n)).collect())
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).sum()
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().map(|f| f.rank()).sum()
    }

    fn require_rank_two(&self) -> Result<()> {
        match self.factors.iter().position(|f| f.rank() < 2) {
            Some(i) => Err(Error::RankTooLow { factor: i, rank: self.factors[i].rank() }),
            None => Ok(()),
        }
    }
}

/// Per-factor diagonal vectors with zero sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanElement {
    pub factors: Vec<Vec<f64>>,
}

impl CartanElement {
    pub fn new(factors: Vec<Vec<f64>>) -> Self {
        CartanElement { factors }
    }

    fn validate(&self, spec: &RootSystemSpec) -> Result<()> {
        if self.factors.len() != spec.factors.len() {
            return Err(Error::InvalidElement(format!(
                "{} component(s) for {} factor(s)",
                self.factors.len(),
                spec.factors.len()
            )));
        }
        for (i, (t, f)) in self.factors.iter().zip(&spec.factors).enumerate() {
            if t.len() != f.n {
                return Err(Error::InvalidElement(format!("factor {i}: {} entries for sl_{}", t.len(), f.n)));
            }
            if t.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidElement(format!("factor {i}: non-finite entry")));
            }
            let sum: f64 = t.iter().sum();
            let scale: f64 = t.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
            if sum.abs() > ROOT_TOLERANCE * scale {
                return Err(Error::InvalidElement(format!("factor {i}: entries sum to {sum}, not 0")));
            }
        }
        Ok(())
    }

    fn tolerance(&self) -> f64 {
        let m = self.factors.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        ROOT_TOLERANCE * m.max(1.0)
    }

    /// Elementwise negation.
    pub fn neg(&self) -> Self {
        CartanElement { factors: self.factors.iter().map(|t| t.iter().map(|x| -x).collect()).collect() }
    }
}

/// `λ(t) = t_i − t_j` for the root `e_i − e_j` of one factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootContribution {
    pub factor: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanEntropy {
    pub entropy: f64,
    pub dim_h_plus: usize,
    pub dim_h_minus: usize,
    pub dim_h_zero: usize,
    /// Roots with positive value, in (factor, i, j) order.
    pub contributions: Vec<RootContribution>,
    /// Factors on which the element is zero.
    pub neutral_factors: Vec<usize>,
}

/// Entropy `Σ_{λ(t) > 0} λ(t)·dim g_λ` with the expanded, contracted and
/// neutral dimensions.
pub fn cartan_entropy(spec: &RootSystemSpec, t: &CartanElement) -> Result<CartanEntropy> {
    t.validate(spec)?;
    let tol = t.tolerance();
    let mut out = CartanEntropy {
        entropy: 0.0,
        dim_h_plus: 0,
        dim_h_minus: 0,
        dim_h_zero: spec.rank(),
        contributions: Vec::new(),
        neutral_factors: Vec::new(),
    };
    for (k, (f, tv)) in spec.factors.iter().zip(&t.factors).enumerate() {
        let mut any = false;
        for i in 0..f.n {
            for j in 0..f.n {
                if i == j {
                    continue;
                }
                let v = tv[i] - tv[j];
                if v > tol {
                    any = true;
                    out.dim_h_plus += f.root_multiplicity;
                    out.entropy += v * f.root_multiplicity as f64;
                    out.contributions.push(RootContribution { factor: k, i, j, value: v, multiplicity: f.root_multiplicity });
                } else if v < -tol {
                    out.dim_h_minus += f.root_multiplicity;
                } else {
                    out.dim_h_zero += f.root_multiplicity;
                }
            }
        }
        if !any {
            out.neutral_factors.push(k);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorCheck {
    pub factor: usize,
    /// Rows: the projections of `a1` and `a2` to this factor.
    pub projections: [Vec<f64>; 2],
    /// Largest 2×2 minor in absolute value.
    pub max_minor: f64,
    pub independent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub factors: Vec<FactorCheck>,
    pub passed: bool,
    pub failing_factors: Vec<usize>,
    pub notes: Vec<String>,
}

/// Every factor must have rank ≥ 2 and the two elements must project to
/// linearly independent vectors in every factor.
pub fn check_theorem14_hypotheses(spec: &RootSystemSpec, a1: &CartanElement, a2: &CartanElement) -> Result<HypothesisReport> {
    spec.require_rank_two()?;
    a1.validate(spec)?;
    a2.validate(spec)?;
    let tol = a1.tolerance().max(a2.tolerance());
    let mut factors = Vec::new();
    let mut failing = Vec::new();
    let mut notes = Vec::new();
    for k in 0..spec.factors.len() {
        let (u, v) = (&a1.factors[k], &a2.factors[k]);
        let mut max_minor = 0.0f64;
        for i in 0..u.len() {
            for j in i + 1..u.len() {
                max_minor = max_minor.max((u[i] * v[j] - u[j] * v[i]).abs());
            }
        }
        let independent = max_minor > tol * tol.max(1.0);
        if !independent {
            failing.push(k);
            notes.push(format!("factor {k}: projections of a1 and a2 are linearly dependent"));
        }
        factors.push(FactorCheck { factor: k, projections: [u.clone(), v.clone()], max_minor, independent });
    }
    Ok(HypothesisReport { passed: failing.is_empty(), factors, failing_factors: failing, notes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanBound {
    pub dim_g: usize,
    pub assumed_dim_e: f64,
    pub entropy: CartanEntropy,
    pub entropy_bound: f64,
    pub unstable_allocation: LyAllocation,
    pub stable_allocation: LyAllocation,
    pub bound: f64,
    /// False when `a1` is zero on some factor (everything there is neutral).
    pub partially_hyperbolic: bool,
    pub notes: Vec<String>,
}

fn root_spectrum(e: &CartanEntropy, tol: f64) -> Result<LyapunovSpectrum> {
    let mut vals: Vec<(f64, usize)> = e.contributions.iter().map(|c| (c.value, c.multiplicity)).collect();
    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut grouped: Vec<(f64, usize)> = Vec::new();
    for (v, m) in vals {
        match grouped.last_mut() {
            Some(last) if (last.0 - v).abs() <= tol => last.1 += m,
            _ => grouped.push((v, m)),
        }
    }
    LyapunovSpectrum::new(grouped)
}

/// Lower bound `δ_s + δ_u + dim H0` for the avoid/dense intersection, with
/// the root values of `a1` as Lyapunov exponents. With `assumed_dim_e`
/// absent the limit `dim E = dim G` is used.
pub fn cartan_dim_bound(spec: &RootSystemSpec, a1: &CartanElement, assumed_dim_e: Option<f64>) -> Result<CartanBound> {
    spec.require_rank_two()?;
    let ent = cartan_entropy(spec, a1)?;
    let back = cartan_entropy(spec, &a1.neg())?;
    let dim_g = spec.dim();
    let dim_e = assumed_dim_e.unwrap_or(dim_g as f64);
    let tol = a1.tolerance();
    let log_l1 = ent.contributions.iter().map(|c| c.value).fold(0.0, f64::max);
    let entropy_bound = prop24_bound(ent.entropy, dim_g, dim_e, log_l1)?;
    let fwd = root_spectrum(&ent, tol)?;
    let bwd = root_spectrum(&back, tol)?;
    let unstable = ly_min_unstable_dim(&fwd, entropy_bound.min(fwd.max_entropy()))?;
    let stable = ly_min_unstable_dim(&bwd, entropy_bound.min(bwd.max_entropy()))?;
    let bound = marstrand_combine(unstable.delta_u, stable.delta_u) + ent.dim_h_zero as f64;
    let partially_hyperbolic = ent.neutral_factors.is_empty();
    let mut notes = Vec::new();
    if !partially_hyperbolic {
        notes.push(format!("a1 is zero on factor(s) {:?}; it must act nontrivially on every factor", ent.neutral_factors));
    }
    Ok(CartanBound {
        dim_g,
        assumed_dim_e: dim_e,
        entropy: ent,
        entropy_bound,
        unstable_allocation: unstable,
        stable_allocation: stable,
        bound,
        partially_hyperbolic,
        notes,
    })
}
