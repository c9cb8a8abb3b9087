//! Avoid-ball subshift for `×b`, Parry samples from it, and certified
//! density of their `×k` orbits.
//!
//! Each sample is a prefix of one Parry-random infinite word (seed and
//! sample index fix the stream), so raising the precision only appends
//! digits. The `×k` orbit is followed until every cell of the `ε` grid is
//! visited, `steps` is reached, or the certified error box outgrows a
//! cell; in the last case the precision is doubled up to a cap, and a
//! sample still unresolved at the cap counts as not dense.

use rayon::prelude::*;
use serde::Serialize;

use toral_core::bounds::{predicted_dim_bound, BoundReport, DirectionData, QGeometry};
use toral_core::orbits::{avoid_check, epsilon_dense, iterate_with, IterateOptions, StopReason, TorusPoint};
use toral_core::symbolic::{avoid_ball_sft, perron, BallSpec, ParryChain, PerronData, SftSpec};
use toral_core::{Approx, ToralMap};

use crate::config::FlagshipConfig;
use crate::error::{LabError, LabResult};

pub const NOTE: &str = "Density verdicts are finite-time, finite-resolution observations on certified orbit \
segments: a pass means every cell of the epsilon grid was visited within the step budget. They are evidence \
for almost-everywhere density under the dense map, not a proof of it.";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SftSummary {
    pub forbidden: Vec<String>,
    pub spectral_radius: Approx,
    pub entropy: Approx,
    pub dimension: Approx,
    pub alive_states: usize,
}

impl SftSummary {
    pub fn new(spec: &SftSpec, p: &PerronData) -> Self {
        SftSummary {
            forbidden: spec.forbidden_strings(),
            spectral_radius: p.spectral_radius,
            entropy: p.entropy,
            dimension: p.dimension,
            alive_states: p.alive_states,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> InvariantCheck {
    InvariantCheck { name: name.into(), passed, detail }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleOutcome {
    pub index: u64,
    /// Digits in the final sample.
    pub precision: u32,
    pub admissible: bool,
    pub avoid_pass: bool,
    /// Orbit points compared against the ball under the avoided map.
    pub avoid_steps: u64,
    pub dense: bool,
    pub resolved: bool,
    pub first_cover_step: Option<u64>,
    pub recorded_steps: u64,
    pub empty_cells: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagshipReport {
    pub base: u32,
    pub dense_multiplier: i64,
    pub ball: BallSpec,
    pub window: u32,
    pub inner: SftSummary,
    pub outer: SftSummary,
    /// Dimension of the avoid-ball set lies between these (inner ≤ true ≤ outer).
    pub dimension_bracket: [f64; 2],
    pub samples: u64,
    pub steps: u64,
    pub epsilon: f64,
    pub grid_depth: u32,
    pub cells: u64,
    pub avoid_passes: u64,
    pub dense_passes: u64,
    pub both_passes: u64,
    pub unresolved: u64,
    pub pass_rate: Option<f64>,
    pub binomial_sigma: Option<f64>,
    pub max_precision_used: u32,
    pub bound_chain: BoundReport,
    pub invariants: Vec<InvariantCheck>,
    pub note: String,
}

impl FlagshipReport {
    pub fn invariants_hold(&self) -> bool {
        self.invariants.iter().all(|c| c.passed)
    }
}

pub struct FlagshipRun {
    pub report: FlagshipReport,
    pub samples: Vec<SampleOutcome>,
}

/// Depth of the coarsest dyadic grid with mesh at most `epsilon`.
pub fn grid_depth(epsilon: f64) -> u32 {
    let mut k = 0;
    let mut mesh = 1.0f64;
    while mesh > epsilon {
        k += 1;
        mesh /= 2.0;
    }
    k
}

struct Context<'a> {
    cfg: &'a FlagshipConfig,
    seed: u64,
    inner: &'a SftSpec,
    chain: &'a ParryChain,
    ball: BallSpec,
    depth: u32,
}

fn run_sample(ctx: &Context<'_>, index: u64) -> LabResult<SampleOutcome> {
    let cfg = ctx.cfg;
    let dense_map = ToralMap::times(cfg.dense_multiplier);
    let mut precision = cfg.initial_precision;
    loop {
        let word = ctx.chain.sample(precision as usize, ctx.seed, index);
        let x = TorusPoint::from_word(&word)?;
        let opts = IterateOptions { steps: cfg.steps, depth: ctx.depth, grid_base: 2, stop_when_covered: true };
        let trace = iterate_with(&dense_map, &x, opts)?;
        let exhausted = matches!(trace.stop, StopReason::PrecisionExhausted(_));
        if exhausted && precision < cfg.max_precision {
            precision = precision.saturating_mul(2).min(cfg.max_precision);
            continue;
        }
        let verdict = epsilon_dense(&trace, cfg.epsilon)?;
        // one grid cell per digit: the avoided map is followed for every digit
        let avoid_opts = IterateOptions { steps: precision as u64, depth: 1, grid_base: cfg.ball.base, stop_when_covered: false };
        let avoid_trace = iterate_with(&ToralMap::times(cfg.ball.base as i64), &x, avoid_opts)?;
        return Ok(SampleOutcome {
            index,
            precision,
            admissible: ctx.inner.is_admissible(&word.digits),
            avoid_pass: avoid_check(&avoid_trace, &ctx.ball),
            avoid_steps: avoid_trace.histogram.recorded,
            dense: verdict.achieved,
            resolved: !exhausted || verdict.achieved,
            first_cover_step: verdict.first_cover_step,
            recorded_steps: trace.histogram.recorded,
            empty_cells: verdict.empty_cells,
        });
    }
}

pub fn run_flagship(cfg: &FlagshipConfig, seed: u64) -> LabResult<FlagshipRun> {
    cfg.validate()?;
    let base = cfg.ball.base;
    let ball = cfg.ball.ball()?;
    let (inner, outer) = avoid_ball_sft(base, &ball, cfg.ball.window)?;
    let p_in = perron(&inner, cfg.perron_tolerance)?;
    let p_out = perron(&outer, cfg.perron_tolerance)?;
    let mut invariants = Vec::new();
    let nested = outer.forbidden().iter().all(|w| inner.is_forbidden(*w));
    invariants.push(check("outer forbidden words are inner forbidden words", nested, format!(
        "{} outer, {} inner",
        outer.forbidden().len(),
        inner.forbidden().len()
    )));
    let ordered = p_in.dimension.lo() <= p_out.dimension.hi();
    invariants.push(check("inner dimension ≤ outer dimension", ordered, format!(
        "{} ≤ {}",
        p_in.dimension.value, p_out.dimension.value
    )));
    for (name, p) in [("inner", &p_in), ("outer", &p_out)] {
        let ok = p.min_row_sum as f64 <= p.spectral_radius.hi() && p.spectral_radius.lo() <= p.max_row_sum as f64;
        invariants.push(check(&format!("{name} spectral radius within row sums"), ok, format!(
            "{} ≤ {} ≤ {}",
            p.min_row_sum, p.spectral_radius, p.max_row_sum
        )));
    }
    let chain = ParryChain::new(&inner, &p_in)?;
    let depth = grid_depth(cfg.epsilon);
    let ctx = Context { cfg, seed, inner: &inner, chain: &chain, ball, depth };
    let samples: Vec<SampleOutcome> =
        (0..cfg.samples).into_par_iter().map(|i| run_sample(&ctx, i)).collect::<LabResult<Vec<_>>>()?;

    let count = |f: &dyn Fn(&SampleOutcome) -> bool| samples.iter().filter(|s| f(s)).count() as u64;
    let avoid_passes = count(&|s| s.avoid_pass);
    let dense_passes = count(&|s| s.dense);
    let both_passes = count(&|s| s.avoid_pass && s.dense);
    let unresolved = count(&|s| !s.resolved);
    let admissible = count(&|s| s.admissible);
    let m = cfg.samples;
    invariants.push(check("every sample is admissible", admissible == m, format!("{admissible}/{m}")));
    invariants.push(check("every sample avoids the ball under the avoided map", avoid_passes == m, format!(
        "{avoid_passes}/{m}"
    )));
    let pass_rate = (m > 0).then(|| both_passes as f64 / m as f64);
    let binomial_sigma = pass_rate.map(|p| (p * (1.0 - p) / m as f64).sqrt());

    let (fwd, bwd) = DirectionData::both(&ToralMap::times(base as i64))?;
    let bound_chain = predicted_dim_bound(&fwd, bwd.as_ref(), QGeometry::new(1, p_in.dimension.value.clamp(0.0, 1.0)))?;

    let report = FlagshipReport {
        base,
        dense_multiplier: cfg.dense_multiplier,
        ball,
        window: cfg.ball.window,
        inner: SftSummary::new(&inner, &p_in),
        outer: SftSummary::new(&outer, &p_out),
        dimension_bracket: [p_in.dimension.value, p_out.dimension.value],
        samples: m,
        steps: cfg.steps,
        epsilon: cfg.epsilon,
        grid_depth: depth,
        cells: 1u64 << depth,
        avoid_passes,
        dense_passes,
        both_passes,
        unresolved,
        pass_rate,
        binomial_sigma,
        max_precision_used: samples.iter().map(|s| s.precision).max().unwrap_or(0),
        bound_chain,
        invariants,
        note: NOTE.into(),
    };
    Ok(FlagshipRun { report, samples })
}

/// Error for a run whose exact stages failed their invariants.
pub fn invariant_error(report: &FlagshipReport) -> Option<LabError> {
    let failed: Vec<&str> = report.invariants.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    (!failed.is_empty()).then(|| LabError::Invariant(failed.join("; ")))
}
