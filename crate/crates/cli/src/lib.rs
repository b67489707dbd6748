//! Command-line front end for `trendlab`: simulate cohorts, analyze
//! simulated or ingested data into CSV tables, and collate a summary.
//!
//! Every command is deterministic given its flags. Exit codes are 0 on
//! success, 1 on runtime or data failures and 2 on usage errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod analyze;
pub mod inputs;
pub mod report;
pub mod simulate;
pub mod table;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] trendlab::Error),
    #[error("incomplete analysis directory {}: missing {}", .dir.display(), .missing.join(", "))]
    MissingSections { dir: PathBuf, missing: Vec<String> },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) | CliError::MissingSections { .. } => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "trendlab", version, about = "Stochastic trend simulation and analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a cohort and write stream, series, durations and a manifest.
    Simulate(SimulateArgs),
    /// Compute figure tables from a simulation or ingest directory.
    Analyze(AnalyzeArgs),
    /// Collate analysis tables into summary.txt.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1000)]
    pub topics: usize,
    /// Growth steps; every series has intervals + 1 entries.
    #[arg(long, default_value_t = 96)]
    pub intervals: usize,
    #[arg(long, default_value_t = 5.0)]
    pub n0: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub gamma_c: f64,
    /// Noise variance [default: 0.25, or 0 for degenerate noise]
    #[arg(long, allow_negative_numbers = true)]
    pub sigma2: Option<f64>,
    /// Stop threshold [default: 1.05]
    #[arg(long, allow_negative_numbers = true, conflicts_with = "stop_p")]
    pub theta: Option<f64>,
    /// Derive theta from a target per-step stop probability (lognormal noise).
    #[arg(long)]
    pub stop_p: Option<f64>,
    #[arg(long, default_value = "lognormal")]
    pub noise: trendlab::NoiseKind,
    #[arg(long, env = "TRENDLAB_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Freeze gamma at c / t0 from interval t0 on.
    #[arg(long)]
    pub constant_gamma_after: Option<usize>,
    /// Intervals exempt from the stop rule [default: min(10, intervals - 1)]
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = 500)]
    pub author_pool: usize,
    #[arg(long, default_value_t = 0.3)]
    pub retweet_prob: f64,
    /// Skip the tweet stream (constant-gamma runs grow geometrically).
    #[arg(long)]
    pub no_stream: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Analysis {
    Gamma,
    Ratios,
    Curvature,
    Durations,
    Sequences,
    Metrics,
    All,
}

impl Analysis {
    pub const SECTIONS: [Analysis; 6] = [
        Analysis::Gamma,
        Analysis::Ratios,
        Analysis::Curvature,
        Analysis::Durations,
        Analysis::Sequences,
        Analysis::Metrics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Gamma => "gamma",
            Analysis::Ratios => "ratios",
            Analysis::Curvature => "curvature",
            Analysis::Durations => "durations",
            Analysis::Sequences => "sequences",
            Analysis::Metrics => "metrics",
            Analysis::All => "all",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.name())
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    pub analysis: Analysis,
    /// Simulation or ingest directory, or a single input file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// First interval of the gamma power-law fit.
    #[arg(long, default_value_t = 5)]
    pub fit_from: usize,
    /// Last interval of the gamma power-law fit.
    #[arg(long, default_value_t = 80)]
    pub fit_to: usize,
    /// Late and early interval of the cumulative ratio.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [14, 2])]
    pub ratio_times: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub kde_points: usize,
    /// Minimum trend length (intervals) of the filtered curvature column; 12 is four hours.
    #[arg(long, default_value_t = 12)]
    pub min_duration: usize,
    /// Durations below this are dropped and the rest shifted by it.
    #[arg(long, default_value_t = 0)]
    pub truncation: u64,
    /// Unit bins of the log-density tail fit [default: all]
    #[arg(long)]
    pub tail_bins: Option<usize>,
    /// Minimum topics for the retweeted-author ranking.
    #[arg(long, default_value_t = 50)]
    pub min_topics: u64,
    /// Initiators per topic taken before its first trending interval.
    #[arg(long, default_value_t = 100)]
    pub k_initiators: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Analysis directory.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Summary path [default: <in>/summary.txt]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Cli {
    /// Parses an argument list (program name first); clap errors become usage errors.
    pub fn parse_args<I, T>(args: I) -> CliResult<Cli>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(args) => simulate::run(&args).map(|_| ()),
        Command::Analyze(args) => analyze::run(&args).map(|_| ()),
        Command::Report(args) => report::run(&args).map(|_| ()),
    }
}
