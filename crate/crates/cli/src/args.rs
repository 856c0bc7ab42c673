use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  internal error
  2  usage error (unknown flag, bad value)
  3  missing or unreadable input, unwritable output
  4  malformed input file or sweep config
  5  infeasible window for the dataset's time span
  6  empty dataset after filtering
  7  invalid parameter value
  8  PageRank did not converge

Errors are printed to stderr as one line:
  error: code=<name> exit=<n> msg=<text>";

/// Trend prediction on time-evolving networks: PageRank combined with
/// recent in-link activity, plus the evaluation harness around it.
#[derive(Debug, Parser)]
#[command(name = "trendrank", version, after_help = EXIT_CODES)]
pub struct Cli {
    /// Worker threads for parallel stages. Results do not depend on it.
    /// Defaults to one per CPU.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean an interaction log into the canonical edge file
    /// (`source<TAB>target<TAB>day`).
    Ingest(IngestArgs),
    /// Generate a synthetic evolving network as an edge file.
    Generate(GenerateArgs),
    /// Dump PageRank of the snapshot before a time as `node_id<TAB>pagerank`.
    Pagerank(PageRankArgs),
    /// Rank nodes with one predictor as `node_id<TAB>score<TAB>rank`.
    Predict(PredictArgs),
    /// Score one predictor at one time and write a single metrics row.
    Evaluate(EvaluateArgs),
    /// Run a full parameter sweep described by a TOML config.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimeUnitArg {
    EpochSeconds,
    Days,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Delimited interaction log.
    #[arg(long)]
    pub input: PathBuf,
    /// Edge file to write; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Keep records whose value is strictly greater than this.
    #[arg(long, default_value_t = 2.0)]
    pub rating_threshold: f64,
    /// Drop actors with fewer surviving records than this.
    #[arg(long, default_value_t = 20)]
    pub min_activity: usize,
    #[arg(long, value_enum, default_value_t = TimeUnitArg::EpochSeconds)]
    pub time_unit: TimeUnitArg,
    /// Keep links from an actor to itself.
    #[arg(long)]
    pub keep_self_links: bool,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Skip the first line.
    #[arg(long)]
    pub header: bool,
    /// Zero-based column of the actor.
    #[arg(long, default_value_t = 0)]
    pub source_col: usize,
    /// Zero-based column of the object.
    #[arg(long, default_value_t = 1)]
    pub target_col: usize,
    /// Zero-based column of the rating value.
    #[arg(long, default_value_t = 2, conflicts_with = "no_value")]
    pub value_col: usize,
    /// The log has no value column; every record passes the rating filter.
    #[arg(long)]
    pub no_value: bool,
    /// Zero-based column of the timestamp.
    #[arg(long, default_value_t = 3)]
    pub time_col: usize,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Edge file to write; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Nodes present at day 0.
    #[arg(long, default_value_t = 2)]
    pub initial_nodes: usize,
    /// New nodes per day.
    #[arg(long, default_value_t = 5.0)]
    pub arrival_rate: f64,
    /// Links per day.
    #[arg(long, default_value_t = 100.0)]
    pub event_rate: f64,
    /// Days of history.
    #[arg(long, default_value_t = 300.0)]
    pub horizon: f64,
    /// Weight of total in-degree against decayed recent in-degree, in [0, 1].
    #[arg(long, default_value_t = 0.2)]
    pub recency_weight: f64,
    /// Per-day decay of past in-links.
    #[arg(long, default_value_t = 0.1)]
    pub aging_rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PageRankOpts {
    /// Link-following probability; 1 - alpha is the random jump.
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// L1 stopping tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iterations: usize,
}

#[derive(Debug, Args)]
pub struct PageRankArgs {
    /// Edge file.
    #[arg(long)]
    pub input: PathBuf,
    /// Use links formed strictly before this day.
    #[arg(long)]
    pub at: f64,
    #[command(flatten)]
    pub pagerank: PageRankOpts,
    /// Score dump to write; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    M1,
    M2,
    M3,
    Pbp,
    Pagerank,
    Recent,
}

#[derive(Debug, Args)]
pub struct PredictorOpts {
    #[arg(long, value_enum)]
    pub variant: VariantArg,
    /// Reference day; only links before it are used.
    #[arg(long)]
    pub t: f64,
    /// Past window in days.
    #[arg(long, default_value_t = 30.0)]
    pub tp: f64,
    /// Per-day activity decay (m1, m2, m3).
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    /// Weight of PageRank against activity (m3).
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// Share of the old degree subtracted (pbp).
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[command(flatten)]
    pub pagerank: PageRankOpts,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Edge file.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub predictor: PredictorOpts,
    /// Write only the best N nodes; all snapshot nodes when omitted.
    #[arg(long)]
    pub top_n: Option<usize>,
    /// Ranked list to write; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TauArg {
    Gamma,
    B,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Edge file.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub predictor: PredictorOpts,
    /// Future window in days.
    #[arg(long, default_value_t = 30.0)]
    pub tf: f64,
    /// Length of the compared top lists.
    #[arg(long, default_value_t = 100)]
    pub top_n: usize,
    /// Kendall tau tie handling.
    #[arg(long, value_enum, default_value_t = TauArg::Gamma)]
    pub tau: TauArg,
    /// CSV to write (header plus one row); stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML sweep description; relative paths inside resolve against its
    /// directory.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `output` from the config.
    #[arg(long)]
    pub output: Option<PathBuf>,
}
