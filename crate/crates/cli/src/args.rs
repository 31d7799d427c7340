use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use repseq::{Engine, DEFAULT_WORD_CAP};

/// Seed used by `verify` when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRACE_DEPTH: usize = 4;
pub const DEFAULT_VERIFY_DEPTH: usize = 8;

#[derive(Debug, Parser)]
#[command(name = "repseq", version, about = "Largest real root of an integer monic polynomial by replacement and counting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate until the count ratios settle and report the root estimate.
    Run(RunConfig),
    /// Print the word sequence W_0 … W_depth with their count vectors.
    Trace(RunConfig),
    /// Check rewriting against the matrix action on random words, and the engines against each other.
    Verify(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Tsv,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["poly", "coeffs"])))]
pub struct RunConfig {
    /// Polynomial text, e.g. "x^3 - x - 1".
    #[arg(long)]
    pub poly: Option<String>,
    /// Ascending integer coefficients c0,c1,…,cm with cm = 1.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    #[arg(long, default_value = "counts")]
    pub engine: Engine,
    #[arg(long, default_value_t = 256)]
    pub iters: usize,
    /// Convergence tolerance as a decimal literal.
    #[arg(long, default_value = "1e-12", allow_hyphen_values = true)]
    pub tol: String,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Trace depth, or engine-comparison depth for `verify`.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Skip the bisection cross-check.
    #[arg(long)]
    pub no_oracle: bool,
    /// Size cap for the word engines.
    #[arg(long, default_value_t = DEFAULT_WORD_CAP)]
    pub word_cap: u64,
}
