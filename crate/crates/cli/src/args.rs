use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "cifc",
    version,
    about = "Rate regions of discrete memoryless cognitive interference channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one bound at one input law or auxiliary assignment.
    Eval(EvalArgs),
    /// Search the weighted-sum frontier of a bound's union of regions.
    Frontier(FrontierArgs),
    /// Falsification search for the interference-regime conditions.
    Classify(ClassifyArgs),
    /// Exhaustively check a one-shot scheme for zero error.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BinningArg {
    Joint,
    TwoStep,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// `builtin:NAME` or a channel JSON file.
    #[arg(long)]
    pub channel: String,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    /// det, semidet, wu, bc, marginal, rtd or better-cog.
    #[arg(long)]
    pub bound: String,
    /// Input law: `uniform:AxB`, `table:exII`, `pointmass:i,j` or a PMF JSON file.
    #[arg(long)]
    pub input: Option<String>,
    /// Auxiliary assignment: a PMF JSON file, or `map:ROLE=SRC,...` extending
    /// `--input` with auxiliaries copying x1, x2, y1, y2, (x1,x2) or const.
    #[arg(long)]
    pub assignment: Option<String>,
    #[arg(long, value_enum, default_value = "joint")]
    pub binning: BinningArg,
}

#[derive(Args, Debug)]
pub struct FrontierArgs {
    #[command(flatten)]
    pub common: Common,
    /// Bound name, as for `eval`.
    #[arg(long)]
    pub bound: String,
    /// Auxiliary alphabet sizes, `ROLE=K[,ROLE=K...]`.
    #[arg(long)]
    pub aux_cards: Option<String>,
    /// Number of evenly spaced weights, or an explicit comma-separated list.
    #[arg(long, default_value = "33")]
    pub weights: String,
    /// Random candidate laws drawn after the support sweep.
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "joint")]
    pub binning: BinningArg,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// `U=K` sets the auxiliary alphabet size (default |X1|·|X2|).
    #[arg(long)]
    pub aux_cards: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Built-in scheme name or a scheme CSV file.
    #[arg(long)]
    pub scheme: String,
    /// Channel for the scheme (defaults to the built-in scheme's channel).
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}
