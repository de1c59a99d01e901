use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "bargainlab",
    version,
    about = "Bargaining learning dynamics and equilibrium experiments",
    args_override_self = true
)]
pub struct Cli {
    /// Worker threads for parallel commands (0 uses all cores).
    #[arg(long, global = true, env = "BARGAINLAB_JOBS")]
    pub jobs: Option<usize>,

    /// Read flags from a key=value file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Self-play between a proposer and a responder learner.
    Run(RunArgs),
    /// Self-play over grids of initial strategies.
    Sweep(SweepArgs),
    /// Feasible equilibrium payoff targets of the two-type market.
    SpeRegion(RegionArgs),
    /// Regret of a learner against a fixed adversary schedule.
    Regret(RegretArgs),
    /// Build and check an equilibrium certificate for one payoff target.
    VerifySpe(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GameArgs {
    /// Number of bargaining rounds.
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    /// Per-round discount factor.
    #[arg(long, default_value_t = 0.9)]
    pub delta: f64,
    /// Grid resolution D; strategies are multiples of 1/D.
    #[arg(long, default_value_t = 16)]
    pub grid: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct LearnerArgs {
    /// Learning rate M.
    #[arg(long, default_value_t = 40.0)]
    pub rate: f64,
    /// Regularizer exponent (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub reg: u32,
    /// Number of steps T.
    #[arg(long, default_value_t = 300)]
    pub horizon: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub learner: LearnerArgs,
    /// Proposer initial strategy, e.g. `1/2,3/4`.
    #[arg(long, allow_hyphen_values = true)]
    pub wp: String,
    /// Responder initial strategy.
    #[arg(long, allow_hyphen_values = true)]
    pub wr: String,
    /// Proposer reference point.
    #[arg(long)]
    pub alpha_p: String,
    /// Responder reference point.
    #[arg(long)]
    pub alpha_r: String,
    /// Include every step's strategies in the record.
    #[arg(long)]
    pub trace: bool,
    /// Write the JSON record here instead of standard output.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Mean over responder initials for each proposer initial.
    OverResponder,
    /// Mean over proposer initials for each responder initial.
    OverProposer,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffOf {
    Proposer,
    Responder,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub learner: LearnerArgs,
    /// Proposer reference point.
    #[arg(long)]
    pub alpha_p: String,
    /// Responder reference point.
    #[arg(long)]
    pub alpha_r: String,
    /// A single proposer initial strategy.
    #[arg(long, conflicts_with = "wp_values")]
    pub wp: Option<String>,
    /// Per-round proposer initial values; all combinations are swept.
    #[arg(long)]
    pub wp_values: Option<String>,
    /// A single responder initial strategy.
    #[arg(long, conflicts_with = "wr_values")]
    pub wr: Option<String>,
    /// Per-round responder initial values; all combinations are swept.
    #[arg(long)]
    pub wr_values: Option<String>,
    #[arg(long, value_enum, default_value_t = Aggregation::OverResponder)]
    pub aggregate: Aggregation,
    /// Whose payoff the aggregated cells average.
    #[arg(long, value_enum, default_value_t = PayoffOf::Proposer)]
    pub payoff: PayoffOf,
    /// Per-run CSV.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Aggregated CSV.
    #[arg(long)]
    #[serde(skip)]
    pub agg_out: Option<PathBuf>,
    /// SVG heatmap of the aggregated cells (two-round games).
    #[arg(long)]
    #[serde(skip)]
    pub svg: Option<PathBuf>,
    /// Manifest path; defaults to the CSV path with `.manifest` appended.
    #[arg(long)]
    #[serde(skip)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionMode {
    /// Every point of the (R+1)×(R+1) lattice on [0, 1]².
    Enumerate,
    /// Uniform random targets.
    Sample,
    /// The lattice plus the two closed-form payoff gaps.
    Gaps,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct MarketArgs {
    #[arg(long, default_value_t = 0.9)]
    pub delta: f64,
    /// Opt-out cost τ.
    #[arg(long)]
    pub tau: f64,
    /// Probability of meeting a c1 candidate.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RegionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub market: MarketArgs,
    #[arg(long, default_value_t = 100)]
    pub resolution: usize,
    #[arg(long, value_enum, default_value_t = RegionMode::Enumerate)]
    pub mode: RegionMode,
    /// Number of targets in sample mode.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Proposer,
    Responder,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RegretArgs {
    #[arg(long, default_value_t = 0.9)]
    pub delta: f64,
    #[arg(long, default_value_t = 2)]
    pub reg: u32,
    /// Horizons T; the grid is D = T and the rate M = rate-scale/√T.
    #[arg(long, default_value = "100,400,1600")]
    pub horizons: String,
    #[arg(long, default_value_t = 1.0)]
    pub rate_scale: f64,
    #[arg(long, value_enum, default_value_t = Role::Proposer)]
    pub role: Role,
    /// Initial strategy and reference point, as real values per round.
    #[arg(long, default_value = "1")]
    pub initial: String,
    /// JSON file with `bins` (values per round) and `cycle` (steps repeated
    /// to the horizon). Defaults to alternating thresholds 0.3 and 0.7.
    #[arg(long)]
    pub adversary: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZPoint {
    Midpoint,
    Lower,
    Upper,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub market: MarketArgs,
    /// The firm's share against c1.
    #[arg(long)]
    pub w1: f64,
    /// The firm's share against c2.
    #[arg(long)]
    pub w2: f64,
    #[arg(long, value_enum, default_value_t = ZPoint::Midpoint)]
    pub z: ZPoint,
    /// Offers scanned per node besides the analytic breakpoints.
    #[arg(long, default_value_t = 200)]
    pub scan_grid: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}
