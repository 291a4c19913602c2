use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lotdraw::experiments::CaseName;
use lotdraw::{CompatibilityRegime, ProcedureKind};

#[derive(Debug, Parser)]
#[command(
    name = "lotdraw",
    version,
    about = "Simulate and verify sequential lots-drawing job assignment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one procedure on a market and report the matching.
    Run(RunArgs),
    /// Regenerate counterexample cases and check every expected outcome.
    Verify(VerifyArgs),
    /// Compare procedures over seeded random plans.
    Montecarlo(MonteCarloArgs),
    /// Write a generated case as market, plan, preferences and partition files.
    Gen(GenArgs),
    /// Maximum matching and regional sufficiency of a market.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub market: PathBuf,
    /// song, ming1, ming2, qing1, qing2 or twotube.
    #[arg(long)]
    pub procedure: ProcedureKind,
    /// C- (eligibility) or C+ (eligibility and avoidance).
    #[arg(long, allow_hyphen_values = true)]
    pub regime: CompatibilityRegime,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Qing partition file (wa1, wa2, wb1, wb2); required for qing1/qing2.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Worker to job-order map; required for song unless --plan is given.
    #[arg(long)]
    pub preferences: Option<PathBuf>,
    /// Fixed assignment plan overriding the procedure's own plan.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include the draw-by-draw event log.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// A case name or `all`.
    pub case: String,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[arg(long)]
    pub market: PathBuf,
    /// Procedures to compare (repeatable or comma-separated); defaults to
    /// every procedure the inputs allow.
    #[arg(long, value_delimiter = ',')]
    pub procedure: Vec<ProcedureKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub regime: CompatibilityRegime,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long)]
    pub partition: Option<PathBuf>,
    #[arg(long)]
    pub preferences: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the paired per-trial sizes as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub case: CaseName,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Market file; the other files are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub market: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub regime: CompatibilityRegime,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
