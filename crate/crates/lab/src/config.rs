//! Experiment configuration: one optional TOML table per subcommand.
//! Unknown tables and fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toral_core::cartan::{RootSystemSpec, SimpleFactor};
use toral_core::symbolic::{BallSpec, Rational};

use crate::error::{LabError, LabResult};

pub type Matrix = Vec<Vec<i64>>;

fn cat() -> Matrix {
    vec![vec![2, 1], vec![1, 1]]
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("nonzero denominator")
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub flagship: Option<FlagshipConfig>,
    pub analyze_map: Option<AnalyzeMapConfig>,
    pub make_pairs: Option<MakePairsConfig>,
    pub rank_one_scan: Option<RankOneScanConfig>,
    pub avoid_sft: Option<AvoidSftConfig>,
    pub sample: Option<SampleConfig>,
    pub density: Option<DensityConfig>,
    pub average: Option<AverageConfig>,
    pub bound_chain: Option<BoundChainConfig>,
    pub cartan: Option<CartanConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> LabResult<Self> {
        toml::from_str(text).map_err(|e| LabError::config(e.to_string().trim_end()))
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            LabError::Config(m) => LabError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

/// The avoid-ball subshift shared by several subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BallConfig {
    pub base: u32,
    pub center: Rational,
    pub radius: Rational,
    pub window: u32,
}

impl Default for BallConfig {
    fn default() -> Self {
        BallConfig { base: 2, center: rat(7, 8), radius: rat(1, 8), window: 2 }
    }
}

impl BallConfig {
    pub fn ball(&self) -> LabResult<BallSpec> {
        if self.base < 2 {
            return Err(LabError::config(format!("base must be at least 2, got {}", self.base)));
        }
        Ok(BallSpec::new(self.center, self.radius)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlagshipConfig {
    pub ball: BallConfig,
    /// The map whose orbits should become dense (`x ↦ k·x`).
    pub dense_multiplier: i64,
    pub samples: u64,
    pub steps: u64,
    pub epsilon: f64,
    /// Digits drawn first; doubled while the certified iteration runs out.
    pub initial_precision: u32,
    pub max_precision: u32,
    pub perron_tolerance: f64,
}

impl Default for FlagshipConfig {
    fn default() -> Self {
        FlagshipConfig {
            ball: BallConfig::default(),
            dense_multiplier: 3,
            samples: 1000,
            steps: 1_000_000,
            epsilon: 0.02,
            initial_precision: 256,
            max_precision: 65536,
            perron_tolerance: 1e-12,
        }
    }
}

impl FlagshipConfig {
    pub fn validate(&self) -> LabResult<()> {
        self.ball.ball()?;
        if self.dense_multiplier.unsigned_abs() < 2 {
            return Err(LabError::config("dense_multiplier must have absolute value at least 2"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(LabError::config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.initial_precision == 0 || self.max_precision < self.initial_precision {
            return Err(LabError::config("need 0 < initial_precision ≤ max_precision"));
        }
        check_tolerance(self.perron_tolerance)
    }
}

fn check_tolerance(t: f64) -> LabResult<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(LabError::config(format!("tolerance must be positive, got {t}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzeMapConfig {
    pub matrix: Matrix,
    pub precision: f64,
}

impl Default for AnalyzeMapConfig {
    fn default() -> Self {
        AnalyzeMapConfig { matrix: cat(), precision: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MakePairsConfig {
    /// Maps with irreducible characteristic polynomial.
    pub seeds: Vec<Matrix>,
    pub coefficient_bound: i64,
    pub relation_bound: u32,
}

impl Default for MakePairsConfig {
    fn default() -> Self {
        MakePairsConfig {
            seeds: vec![cat(), vec![vec![0, 1], vec![1, 1]], vec![vec![0, 0, 1], vec![1, 0, 3], vec![0, 1, 0]]],
            coefficient_bound: 2,
            relation_bound: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RankOneScanConfig {
    pub t: Matrix,
    pub s: Matrix,
    pub bound: u32,
    pub twist_cap: u32,
}

impl Default for RankOneScanConfig {
    fn default() -> Self {
        RankOneScanConfig {
            t: vec![vec![2, 1, 0, 0], vec![1, 1, 0, 0], vec![0, 0, 2, 0], vec![0, 0, 0, 3]],
            s: vec![vec![5, 3, 0, 0], vec![3, 2, 0, 0], vec![0, 0, 3, 0], vec![0, 0, 0, 2]],
            bound: 20,
            twist_cap: toral_core::action::DEFAULT_TWIST_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AvoidSftConfig {
    pub ball: BallConfig,
    pub perron_tolerance: f64,
}

impl Default for AvoidSftConfig {
    fn default() -> Self {
        AvoidSftConfig { ball: BallConfig::default(), perron_tolerance: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    pub ball: BallConfig,
    pub samples: u64,
    pub length: usize,
    pub perron_tolerance: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { ball: BallConfig::default(), samples: 10, length: 64, perron_tolerance: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityConfig {
    pub matrix: Matrix,
    /// Exact start point, one rational per coordinate (`"p/q"`).
    pub start: Vec<Rational>,
    /// Truncated start point as digit strings in `digit_base`; overrides `start`.
    pub digits: Option<Vec<String>>,
    pub digit_base: u32,
    pub steps: u64,
    pub depth: u32,
    pub epsilon: f64,
    pub two_sided: bool,
    /// Optional ball for the avoid check (1-D balls; sup-norm cube on `T^d`).
    pub avoid: Option<AvoidBall>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AvoidBall {
    pub center: Rational,
    pub radius: Rational,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig {
            matrix: vec![vec![3]],
            start: vec![rat(1, 7)],
            digits: None,
            digit_base: 2,
            steps: 4096,
            depth: 8,
            epsilon: 1.0 / 64.0,
            two_sided: false,
            avoid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AverageConfig {
    pub ball: BallConfig,
    pub depth: u32,
    pub multiplier: i64,
    pub checkpoints: Vec<u64>,
    pub perron_tolerance: f64,
}

impl Default for AverageConfig {
    fn default() -> Self {
        AverageConfig {
            ball: BallConfig::default(),
            depth: 8,
            multiplier: 3,
            checkpoints: vec![64, 256, 1024, 4096],
            perron_tolerance: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundChainConfig {
    pub matrix: Matrix,
    pub assumed_dim_e: Vec<f64>,
}

impl Default for BoundChainConfig {
    fn default() -> Self {
        BoundChainConfig { matrix: cat(), assumed_dim_e: vec![1.0, 1.5, 1.9, 2.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CartanConfig {
    pub factors: Vec<FactorEntry>,
    pub a1: Vec<Vec<f64>>,
    pub a2: Option<Vec<Vec<f64>>>,
    pub assumed_dim_e: Option<f64>,
}

impl Default for CartanConfig {
    fn default() -> Self {
        CartanConfig {
            factors: vec![FactorEntry::Sl(3)],
            a1: vec![vec![1.0, 0.0, -1.0]],
            a2: Some(vec![vec![0.0, 1.0, -1.0]]),
            assumed_dim_e: None,
        }
    }
}

/// `sl_n` written either as `n` or as `{ n = .., root_multiplicity = .. }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorEntry {
    Sl(usize),
    Full(SimpleFactor),
}

impl CartanConfig {
    pub fn spec(&self) -> LabResult<RootSystemSpec> {
        let factors = self
            .factors
            .iter()
            .map(|f| match *f {
                FactorEntry::Sl(n) => SimpleFactor::sl(n),
                FactorEntry::Full(sf) => sf,
            })
            .collect();
        Ok(RootSystemSpec::new(factors)?)
    }
}
