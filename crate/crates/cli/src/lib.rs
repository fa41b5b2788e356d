//! Command-line front end: parses problem configs, dispatches the
//! solve/flow/diagnostic/suite pipelines and writes self-describing
//! reports. Deterministic given (config, seed).

pub mod config;
pub mod report;
pub mod tasks;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use tasks::TaskContext;

#[derive(Parser)]
#[command(
    name = "harmap",
    version,
    about = "Energy-minimizing maps from weighted graphs into NPC targets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Solve the Dirichlet problem described by a config file.
    Solve(RunArgs),
    /// Run the minimizing-movement flow.
    Flow(RunArgs),
    /// Solve, then run the full diagnostic battery.
    Diag(RunArgs),
    /// Run the structural-property suite and fail on violations.
    Suite(RunArgs),
    /// Write edge-list and measure files for a builtin generator.
    GenGraph(GenGraphArgs),
}

#[derive(Args)]
pub struct RunArgs {
    /// Problem description (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for reports.
    #[arg(long)]
    pub out: PathBuf,
    /// Override `[tolerances] seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override `[tolerances] tol`.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Override `[tolerances] max_sweeps`.
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
}

#[derive(Args)]
pub struct GenGraphArgs {
    /// `path` | `grid` | `star`.
    #[arg(long)]
    pub kind: String,
    /// Vertices for `path`; rows for `grid`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Columns for `grid`.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub legs: Option<usize>,
    #[arg(long)]
    pub arms: Option<usize>,
    /// Edge length scale.
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    /// Uniform vertex measure.
    #[arg(long, default_value_t = 1.0)]
    pub measure: f64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => {
            let ctx = TaskContext::prepare(&args.config, args.seed, args.tol, args.max_iter)?;
            tasks::run_solve(&ctx, &args.out)
        }
        Command::Flow(args) => {
            let ctx = TaskContext::prepare(&args.config, args.seed, args.tol, args.max_iter)?;
            tasks::run_flow_task(&ctx, &args.out)
        }
        Command::Diag(args) => {
            let ctx = TaskContext::prepare(&args.config, args.seed, args.tol, args.max_iter)?;
            tasks::run_diag(&ctx, &args.out)
        }
        Command::Suite(args) => {
            let ctx = TaskContext::prepare(&args.config, args.seed, args.tol, args.max_iter)?;
            tasks::run_suite(&ctx, &args.out)
        }
        Command::GenGraph(args) => tasks::run_gen_graph(&args),
    }
}
