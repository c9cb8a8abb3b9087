use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{self, Outcome};
use crate::config::ConfigFile;
use crate::error::{LabError, LabResult, EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "toral", version, about = "Dynamics lab for commuting maps of the torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML file with one table per subcommand; missing tables use defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64", default_value_t = 0)]
    pub seed: u64,
    /// Directory for report files.
    #[arg(long, global = true, value_name = "DIR", default_value = "toral-out")]
    pub out: PathBuf,
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Overrides the numerical tolerance of the chosen subcommand.
    #[arg(long, global = true, value_name = "FLOAT")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Characteristic polynomial, certified spectrum, entropy and κ of one map.
    AnalyzeMap,
    /// Commuting partners of seed maps and their multiplicative dependence.
    MakePairs,
    /// Search the invariant blocks of a commuting pair for rank-one factors.
    RankOneScan,
    /// Inner and outer subshifts for the avoid-ball set of `×b`.
    AvoidSft,
    /// Parry-measure samples from the inner subshift.
    Sample,
    /// Certified orbit, ε-density verdict and optional avoid check.
    Density,
    /// Cesàro averages of the Parry grid measure and their distance to uniform.
    Average,
    /// Entropy → dimension inequality chain for one map.
    BoundChain,
    /// Root-system entropy, hypotheses and dimension bound for `sl_n` products.
    Cartan,
    /// Avoid ×2, dense under ×3 on many Parry samples.
    Flagship,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::AnalyzeMap => "analyze-map",
            Command::MakePairs => "make-pairs",
            Command::RankOneScan => "rank-one-scan",
            Command::AvoidSft => "avoid-sft",
            Command::Sample => "sample",
            Command::Density => "density",
            Command::Average => "average",
            Command::BoundChain => "bound-chain",
            Command::Cartan => "cartan",
            Command::Flagship => "flagship",
        }
    }
}

fn override_tolerance(cfg: &mut ConfigFile, cmd: Command, t: f64) -> LabResult<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(LabError::config(format!("--tolerance must be positive, got {t}")));
    }
    match cmd {
        Command::AnalyzeMap => cfg.analyze_map.get_or_insert_with(Default::default).precision = t,
        Command::AvoidSft => cfg.avoid_sft.get_or_insert_with(Default::default).perron_tolerance = t,
        Command::Sample => cfg.sample.get_or_insert_with(Default::default).perron_tolerance = t,
        Command::Average => cfg.average.get_or_insert_with(Default::default).perron_tolerance = t,
        Command::Flagship => cfg.flagship.get_or_insert_with(Default::default).perron_tolerance = t,
        Command::MakePairs | Command::RankOneScan | Command::Density | Command::BoundChain | Command::Cartan => {
            return Err(LabError::config(format!("{} is exact and takes no --tolerance", cmd.name())))
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> LabResult<Outcome> {
    let mut cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    if let Some(t) = cli.tolerance {
        override_tolerance(&mut cfg, cli.command, t)?;
    }
    let (out, seed) = (cli.out.as_path(), cli.seed);
    match cli.command {
        Command::AnalyzeMap => commands::analyze_map(&cfg.analyze_map.unwrap_or_default(), out, seed),
        Command::MakePairs => commands::make_pairs(&cfg.make_pairs.unwrap_or_default(), out, seed),
        Command::RankOneScan => commands::rank_one_scan(&cfg.rank_one_scan.unwrap_or_default(), out, seed),
        Command::AvoidSft => commands::avoid_sft(&cfg.avoid_sft.unwrap_or_default(), out, seed),
        Command::Sample => commands::sample(&cfg.sample.unwrap_or_default(), out, seed),
        Command::Density => commands::density(&cfg.density.unwrap_or_default(), out, seed),
        Command::Average => commands::average(&cfg.average.unwrap_or_default(), out, seed),
        Command::BoundChain => commands::bound_chain(&cfg.bound_chain.unwrap_or_default(), out, seed),
        Command::Cartan => commands::cartan(&cfg.cartan.unwrap_or_default(), out, seed),
        Command::Flagship => commands::flagship(&cfg.flagship.unwrap_or_default(), out, seed),
    }
}

/// Runs the parsed command on a dedicated pool when `--threads` is given.
pub fn run(cli: &Cli) -> LabResult<Outcome> {
    match cli.threads {
        Some(0) => Err(LabError::config("--threads must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| LabError::config(format!("cannot start {n} threads: {e}")))?;
            pool.install(|| dispatch(cli))
        }
        None => dispatch(cli),
    }
}

/// Parses `args`, runs, prints a summary and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            // a closed stdout (e.g. piped into `head`) is not an error
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}: {}", cli.command.name(), outcome.summary);
            for f in &outcome.files {
                let _ = writeln!(stdout, "  wrote {}", f.display());
            }
            match outcome.invariant_failure {
                Some(msg) => {
                    eprintln!("toral: invariant violation: {msg}");
                    EXIT_INVARIANT
                }
                None => EXIT_OK,
            }
        }
        Err(e) => {
            eprintln!("toral: {e}");
            e.exit_code()
        }
    }
}
