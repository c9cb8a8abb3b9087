//! One function per subcommand. Each writes its report files through a
//! [`ReportWriter`] and returns a one-line summary.

use std::path::{Path, PathBuf};

use num_integer::Integer;
use serde::Serialize;

use toral_core::action::{find_commuting_partners, multiplicative_dependence, rank_one_factor_scan, CommutingPair, DependenceCertificate};
use toral_core::averaging::{cesaro_checkpoints, distance_to_uniform, GridMeasure, MASS_TOLERANCE};
use toral_core::bounds::{predicted_dim_bound, BoundReport, DirectionData, QGeometry};
use toral_core::cartan::{cartan_dim_bound, cartan_entropy, check_theorem14_hypotheses, CartanElement};
use toral_core::orbits::{epsilon_dense, first_ball_entry, iterate, iterate_two_sided, TorusPoint};
use toral_core::spectral::{char_poly_string, entropy_report, spectral_data, MapKind};
use toral_core::symbolic::{avoid_ball_sft, perron, BallSpec, ParryChain};
use toral_core::ToralMap;

use crate::config::{
    AnalyzeMapConfig, AverageConfig, AvoidSftConfig, BoundChainConfig, CartanConfig, DensityConfig, FlagshipConfig,
    MakePairsConfig, RankOneScanConfig, SampleConfig,
};
use crate::error::{LabError, LabResult};
use crate::flagship::{invariant_error, run_flagship};
use crate::flagship::{InvariantCheck, SftSummary};
use crate::report::ReportWriter;

pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
    /// Set when an exact stage failed its invariant (exit status 1).
    pub invariant_failure: Option<String>,
}

impl Outcome {
    fn ok(summary: String, w: ReportWriter) -> Self {
        Outcome { summary, files: w.written().to_vec(), invariant_failure: None }
    }

    fn checked(summary: String, w: ReportWriter, checks: &[InvariantCheck]) -> Self {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        let invariant_failure = (!failed.is_empty()).then(|| failed.join("; "));
        Outcome { summary, files: w.written().to_vec(), invariant_failure }
    }
}

fn check(name: &str, passed: bool, detail: String) -> InvariantCheck {
    InvariantCheck { name: name.into(), passed, detail }
}

fn map(rows: &[Vec<i64>]) -> LabResult<ToralMap> {
    Ok(ToralMap::new(rows.to_vec())?)
}

// ---------------------------------------------------------------- analyze-map

#[derive(Serialize)]
struct AnalyzeReport {
    matrix: ToralMap,
    kind: MapKind,
    det: String,
    char_poly: String,
    spectral: toral_core::SpectralData,
    entropy: toral_core::EntropyReport,
}

#[derive(Serialize)]
struct EigenRow {
    rank: usize,
    re: f64,
    im: f64,
    modulus: f64,
    multiplicity: usize,
    error_radius: f64,
}

pub fn analyze_map(cfg: &AnalyzeMapConfig, out: &Path, seed: u64) -> LabResult<Outcome> {
    let m = map(&cfg.matrix)?;
    let spectral = spectral_data(&m, cfg.precision)?;
    let entropy = entropy_report(&m, &spectral)?;
    let mut w = ReportWriter::new(out, "analyze-map", cfg, seed)?;
    let rows: Vec<EigenRow> = spectral
        .ordering
        .iter()
        .enumerate()
        .map(|(rank, &i)| {
            let e = &spectral.eigenvalues[i];
            EigenRow { rank, re: e.re, im: e.im, modulus: e.modulus(), multiplicity: e.multiplicity, error_radius: e.error_radius }
        })
        .collect();
    w.csv("eigenvalues.csv", rows)?;
    let summary = format!(
        "h_top = {} (κ = {}), hyperbolic = {}, ergodic = {}",
        entropy.h_top, entropy.kappa, entropy.hyperbolic, entropy.ergodic
    );
    let report = AnalyzeReport {
        kind: m.kind(),
        det: m.det().to_string(),
        char_poly: char_poly_string(&m),
        matrix: m,
        spectral,
        entropy,
    };
    w.json("analyze-map.json", &report)?;
    Ok(Outcome::ok(summary, w))
}

// ----------------------------------------------------------------- make-pairs

#[derive(Serialize)]
struct PairRow {
    seed_index: usize,
    seed: ToralMap,
    partner: ToralMap,
    commuting: bool,
    dependence: DependenceCertificate,
}

#[derive(Serialize)]
struct PairsReport {
    seeds: usize,
    pairs: usize,
    independent: usize,
    dependent: usize,
    skipped: Vec<String>,
}

pub fn make_pairs(cfg: &MakePairsConfig, out: &Path, seed: u64) -> LabResult<Outcome> {
    let bound = u32::try_from(cfg.coefficient_bound)
        .map_err(|_| LabError::config(format!("coefficient_bound must be non-negative, got {}", cfg.coefficient_bound)))?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (i, rows_i) in cfg.seeds.iter().enumerate() {
        let s = map(rows_i)?;
        let partners = match find_commuting_partners(&s, bound) {
            Ok(p) => p,
            Err(e @ toral_core::Error::ReducibleSeed(_)) => {
                skipped.push(format!("seed {i}: {e}"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for p in partners {
            let pair = CommutingPair::new(s.clone(), p.clone())?;
            let commuting = pair.verified_commuting;
            let dependence = if commuting { multiplicative_dependence(&pair, cfg.relation_bound)? } else {
                DependenceCertificate { relation: None, search_bound: cfg.relation_bound, log_ratio_witness: None }
            };
            rows.push(PairRow { seed_index: i, seed: s.clone(), partner: p, commuting, dependence });
        }
    }
    let mut w = ReportWriter::new(out, "make-pairs", cfg, seed)?;
    w.jsonl("pairs.jsonl", &rows)?;
    let dependent = rows.iter().filter(|r| r.dependence.relation.is_some()).count();
    let checks = [check(
        "every partner commutes with its seed",
        rows.iter().all(|r| r.commuting),
        format!("{} pairs", rows.len()),
    )];
    let report = PairsReport {
        seeds: cfg.seeds.len(),
        pairs: rows.len(),
        independent: rows.len() - dependent,
        dependent,
        skipped,
    };
    w.json("make-pairs.json", &(&report, &checks))?;
    let summary = format!("{} pairs, {} independent up to bound {}", report.pairs, report.independent, cfg.relation_bound);
    Ok(Outcome::checked(summary, w, &checks))
}

// -------------------------------------------------------------- rank-one-scan

pub fn rank_one_scan(cfg: &RankOneScanConfig, out: &Path, seed: u64) -> LabResult<Outcome> {
    let pair = CommutingPair::new(map(&cfg.t)?, map(&cfg.s)?)?;
    if !pair.verified_commuting {
        return Err(LabError::config("t and s do not commute"));
    }
    let report = rank_one_factor_scan(&pair, cfg.bound, cfg.twist_cap)?;
    let mut w = ReportWriter::new(out, "rank-one-scan", cfg, seed)?;
    w.json("rank-one-scan.json", &report)?;
    let summary = format!("{} block(s): {:?}", report.blocks.len(), report.overall);
    Ok(Outcome::ok(summary, w))
}

// ------------------------------------------------------------------ avoid-sft

#[derive(Serialize)]
struct AvoidSftReport {
    ball: BallSpec,
    base: u32,
    window: u32,
    inner: SftSummary,
    outer: SftSummary,
    dimension_bracket: [f64; 2],
    invariants: Vec<InvariantCheck>,
}

pub fn avoid_sft(cfg: &AvoidSftConfig, out: &Path, seed: u64) -> LabResult<Outcome> {
    let ball = cfg.ball.ball()?;
    let (inner, outer) = avoid_ball_sft(cfg.ball.base, &ball, cfg.ball.window)?;
    let p_in = perron(&inner, cfg.perron_tolerance)?;
    let p_out = perron(&outer, cfg.perron_tolerance)?;
    let invariants = vec![
        check(
            "outer forbidden words are inner forbidden words",
            outer.forbidden().iter().all(|w| inner.is_forbidden(*w)),
            format!("{} outer, {} inner", outer.forbidden().len(), inner.forbidden().len()),
        ),
        check(
            "inner dimension ≤ outer dimension",
            p_in.dimension.lo() <= p_out.dimension.hi(),
            format!("{} ≤ {}", p_in.dimension.value, p_out.dimension.value),
        ),
    ];
    let mut w = ReportWriter::new(out, "avoid-sft", cfg, seed)?;
    w.raw_json("inner.sft.json", &inner)?;
    w.raw_json("outer.sft.json", &outer)?;
    let report = AvoidSftReport {
        ball,
        base: cfg.ball.base,
        window: cfg.ball.window,
        inner: SftSummary::new(&inner, &p_in),
        outer: SftSummary::new(&outer, &p_out),
        dimension_bracket: [p_in.dimension.value, p_out.dimension.value],
        invariants,
    };
    w.json("avoid-sft.json", &report)?;
    let summary = format!("dimension in [{}, {}]", report.dimension_bracket[0], report.dimension_bracket[1]);
    Ok(Outcome::checked(summary, w, &report.invariants))
}

// --------------------------------------------------------------------- sample

#[derive(Serialize)]
struct SampleRow {
    index: u64,
    digits: String,
    value: f64,
    admissible: bool,
}

pub fn sample(cfg: &SampleConfig, out: &Path, seed: u64) -> LabResult<Outcome> {
    let ball = cfg.ball.ball()?;
    let (inner, _) = avoid_ball_sft(cfg.ball.base, &ball, cfg.ball.window)?;
    let p = perron(&inner, cfg.perron_tolerance)?;
    let chain = ParryChain::new(&inner, &p)?;
    let rows: Vec<SampleRow> = (0..cfg.samples)
        .map(|i| {
            let word = chain.sample(cfg.length, seed, i);
            SampleRow {
                index: i,
                digits: word.digits.iter().filter_map(|&d| char::from_digit(d as u32, cfg.ball.base)).collect(),
                value: word.to_f64(),
                admissible: inner.is_admissible(&word.digits),
            }
        })
        .collect();
    let ok = rows.iter().filter(|r| r.admissible).count() as u64;
    let checks = [check("every sample is admissible", ok == cfg.samples, format!("{ok}/{}", cfg.samples))];
    let mut w = ReportWriter::new(out, "sample", cfg, seed)?;
    w.jsonl("samples.jsonl", &rows)?;
    w.json("sample.json", &(&inner, &checks))?;
    Ok(Outcome::checked(format!("{} samples of length {}", cfg.samples, cfg.length), w, &checks))
}

// -------------------------------------------------------------------- density

#[derive(Serialize)]
struct DensityReport {
    map: ToralMap,
    start: Vec<f64>,
    start_precision: u32,
    truncated: bool,
    stop: String,
    precision_exhausted_at: Option<u64>,
    verdict: toral_core::orbits::DensityVerdict,
    avoid: Option<AvoidResult>,
}

#[derive(Serialize)]
struct AvoidResult {
    ball: BallSpec,
    avoided: bool,
    first_entry: Option<i64>,
}

#[derive(Serialize)]
struct CellRow {
    cell: usize,
    visits: u64,
    first_visit: Option<u64>,
}

fn start_point(cfg: &DensityConfig, dim: usize) -> LabResult<TorusPoint> {
    if let Some(digits) = &cfg.digits {
        if digits.len() != dim {
            return Err(LabError::config(format!("digits: {} coordinate(s) for dimension {dim}", digits.len())));
        }
        let parsed: Vec<Vec<u8>> = digits
            .iter()
            .map(|s| {
                s.chars()
                    .map(|c| {
                        c.to_digit(cfg.digit_base)
                            .map(|d| d as u8)
                            .ok_or_else(|| LabError::config(format!("digit {c:?} is not valid in base {}", cfg.digit_base)))
                    })
                    .collect()
            })
            .collect::<LabResult<_>>()?;
        let refs: Vec<&[u8]> = parsed.iter().map(|v| v.as_slice()).collect();
        return Ok(TorusPoint::from_digits(cfg.digit_base, &refs)?);
    }
    if cfg.start.len() != dim {
        return Err(LabError::config(format!("start: {} coordinate(s) for dimension {dim}", cfg.start.len())));
    }
    let den = cfg.start.iter().fold(1i64, |l, r| l.lcm(&r.denom()));
    let nums: Vec<u64> = cfg
        .start
        .iter()
        .map(|r| (r.numer() * (den / r.denom())).rem_euclid(den) as u64)
        .collect();
    Ok(TorusPoint::exact(&nums, den as u64)?)
}

pub fn density(cfg: &DensityConfig, out: &Path, seed: u64) -> LabResult<Outcome> {
    let m = map(&cfg.matrix)?;
    let x = start_point(cfg, m.dim())?;
    let trace = if cfg.two_sided {
        iterate_two_sided(&m, &x, cfg.steps, cfg.depth)?
    } else {
        iterate(&m, &x, cfg.steps, cfg.depth)?
    };
    let verdict = epsilon_dense(&trace, cfg.epsilon)?;
    let avoid = match &cfg.avoid {
        Some(b) => {
            let ball = BallSpec::new(b.center, b.radius)?;
            let first_entry = first_ball_entry(&trace, &ball);
            Some(AvoidResult { ball, avoided: first_entry.is_none(), first_entry })
        }
        None => None,
    };
    let mut w = ReportWriter::new(out, "density", cfg, seed)?;
    let h = &trace.histogram;
    w.csv(
        "cells.csv",
        h.visits.iter().zip(&h.first_visit).enumerate().map(|(cell, (&visits, &first_visit))| CellRow { cell, visits, first_visit }),
    )?;
    let summary = format!(
        "{} recorded steps, {} empty cell(s) at mesh {}, dense = {}",
        verdict.recorded, verdict.empty_cells, verdict.mesh, verdict.achieved
    );
    let report = DensityReport {
        start: x.to_f64(),
        start_precision: x.precision(),
        truncated: x.is_truncated(),
        map: m,
        stop: format!("{:?}", trace.stop),
        precision_exhausted_at: trace.precision_exhausted_at,
        verdict,
        avoid,
    };
    w.json("density.json", &report)?;
    Ok(Outcome::ok(summary, w))
}

// -------------------------------------------------------------------- average

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageRow {
    pub n: u64,
    pub total_variation: f64,
    pub max_cell_deviation: f64,
    pub mass: f64,
}

#[derive(Serialize)]
struct AverageReport {
    multiplier: i64,
    depth: u32,
    initial_distance: toral_core::averaging::UniformDistance,
    checkpoints: Vec<AverageRow>,
    invariants: Vec<InvariantCheck>,
}

pub fn average_rows(cfg: &AverageConfig) -> LabResult<(toral_core::averaging::UniformDistance, Vec<AverageRow>)> {
    let ball = cfg.ball.ball()?;
    let (inner, _) = avoid_ball_sft(cfg.ball.base, &ball, cfg.ball.window)?;
    let p = perron(&inner, cfg.perron_tolerance)?;
    let initial = GridMeasure::parry(&inner, &p, cfg.depth)?;
    let m = ToralMap::times(cfg.multiplier);
    let rows = cesaro_checkpoints(&initial, &m, &cfg.checkpoints)?
        .into_iter()
        .map(|(n, mu)| {
            let d = distance_to_uniform(&mu);
            AverageRow { n, total_variation: d.total_variation, max_cell_deviation: d.max_cell_deviation, mass: mu.total_mass() }
        })
        .collect();
    Ok((distance_to_uniform(&initial), rows))
}

pub fn average(cfg: &AverageConfig, out: &Path, seed: u64) -> LabResult<Outcome> {
    let (initial_distance, rows) = average_rows(cfg)?;
    let worst = rows.iter().map(|r| (r.mass - 1.0).abs()).fold(0.0, f64::max);
    let invariants = vec![check("averages are probability measures", worst <= MASS_TOLERANCE, format!("max |mass − 1| = {worst:e}"))];
    let mut w = ReportWriter::new(out, "average", cfg, seed)?;
    w.csv("average.csv", &rows)?;
    let summary = match rows.last() {
        Some(r) => format!("TV to uniform at N = {}: {}", r.n, r.total_variation),
        None => "no checkpoints".into(),
    };
    let report = AverageReport { multiplier: cfg.multiplier, depth: cfg.depth, initial_distance, checkpoints: rows, invariants };
    w.json("average.json", &report)?;
    Ok(Outcome::checked(summary, w, &report.invariants))
}

// ---------------------------------------------------------------- bound-chain

#[derive(Serialize)]
struct BoundRow {
    assumed_dim_e: f64,
    entropy_bound: f64,
    delta_u: f64,
    delta_s: f64,
    combined: f64,
}

pub fn bound_chain(cfg: &BoundChainConfig, out: &Path, seed: u64) -> LabResult<Outcome> {
    let m = map(&cfg.matrix)?;
    let (fwd, bwd) = DirectionData::both(&m)?;
    let reports: Vec<BoundReport> = cfg
        .assumed_dim_e
        .iter()
        .map(|&e| predicted_dim_bound(&fwd, bwd.as_ref(), QGeometry::new(m.dim(), e)))
        .collect::<Result<_, _>>()?;
    let mut w = ReportWriter::new(out, "bound-chain", cfg, seed)?;
    w.csv(
        "bound-chain.csv",
        reports.iter().map(|r| BoundRow {
            assumed_dim_e: r.q_geometry.assumed_dim_e,
            entropy_bound: r.entropy_bound,
            delta_u: r.delta_u_bound,
            delta_s: r.delta_s_bound,
            combined: r.combined,
        }),
    )?;
    w.json("bound-chain.json", &reports)?;
    let summary = reports
        .iter()
        .map(|r| format!("dim E = {} → {}", r.q_geometry.assumed_dim_e, r.combined))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(Outcome::ok(summary, w))
}

// --------------------------------------------------------------------- cartan

#[derive(Serialize)]
struct CartanReport {
    entropy: toral_core::cartan::CartanEntropy,
    hypotheses: Option<toral_core::cartan::HypothesisReport>,
    bound: Option<toral_core::cartan::CartanBound>,
    bound_skipped: Option<String>,
}

pub fn cartan(cfg: &CartanConfig, out: &Path, seed: u64) -> LabResult<Outcome> {
    let spec = cfg.spec()?;
    let a1 = CartanElement::new(cfg.a1.clone());
    let entropy = cartan_entropy(&spec, &a1)?;
    let hypotheses = match &cfg.a2 {
        Some(a2) => Some(check_theorem14_hypotheses(&spec, &a1, &CartanElement::new(a2.clone()))?),
        None => None,
    };
    let (bound, bound_skipped) = match cartan_dim_bound(&spec, &a1, cfg.assumed_dim_e) {
        Ok(b) => (Some(b), None),
        Err(e @ toral_core::Error::RankTooLow { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let mut summary = format!(
        "entropy {} with dim H+ = {}, H− = {}, H0 = {}",
        entropy.entropy, entropy.dim_h_plus, entropy.dim_h_minus, entropy.dim_h_zero
    );
    if let Some(h) = &hypotheses {
        summary.push_str(&format!("; hypotheses {}", if h.passed { "hold" } else { "fail" }));
    }
    let mut w = ReportWriter::new(out, "cartan", cfg, seed)?;
    w.json("cartan.json", &CartanReport { entropy, hypotheses, bound, bound_skipped })?;
    Ok(Outcome::ok(summary, w))
}

// ------------------------------------------------------------------- flagship

pub fn flagship(cfg: &FlagshipConfig, out: &Path, seed: u64) -> LabResult<Outcome> {
    let run = run_flagship(cfg, seed)?;
    let mut w = ReportWriter::new(out, "flagship", cfg, seed)?;
    w.csv("flagship_samples.csv", &run.samples)?;
    w.json("flagship.json", &run.report)?;
    let r = &run.report;
    let summary = format!(
        "dimension {} (inner) ≤ {} (outer); {}/{} samples avoid and are {}-dense within {} steps ({} unresolved)",
        r.dimension_bracket[0], r.dimension_bracket[1], r.both_passes, r.samples, r.epsilon, r.steps, r.unresolved
    );
    Ok(Outcome { summary, files: w.written().to_vec(), invariant_failure: invariant_error(r).map(|e| e.to_string()) })
}
