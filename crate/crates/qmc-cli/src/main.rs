//! `qmc`: generate (shifted) Halton points, compute worst-case errors and
//! L2 discrepancies, run convergence studies, and verify the closed-form
//! identities against brute force.
//!
//! Every command is deterministic given its full flag set (including seeds
//! and any `--threads` cap). Exit codes: 0 success, 1 verification failure,
//! 2 usage/config error, 3 numerical-consistency error.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use padic_qmc::QmcError;

#[derive(Parser)]
#[command(name = "qmc", version, about = "Open-type QMC with p-adically shifted Halton sequences")]
struct Cli {
    /// Worker threads for parallel computations (0 = automatic). Output is
    /// identical at any setting. Env fallback: QMC_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate Halton points (optionally p-adically shifted) as CSV.
    Gen(commands::gen::GenArgs),
    /// Worst-case integration errors: exact, Monte Carlo over shifts,
    /// truncated series with tail, and theory bounds.
    Error(commands::error::ErrorArgs),
    /// Weighted or unweighted L2 discrepancy of a point block.
    Discrepancy(commands::discrepancy::DiscrepancyArgs),
    /// Convergence study over a geometric N grid with a log-log slope fit.
    Convergence(commands::convergence::ConvergenceArgs),
    /// Run the brute-force verification suite.
    Verify(commands::verify::VerifyArgs),
}

fn main() {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| std::env::var("QMC_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0);
    if threads > 0 {
        // ignore failure: the pool may already exist in tests
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let outcome = match cli.command {
        Command::Gen(args) => commands::gen::run(args),
        Command::Error(args) => commands::error::run(args),
        Command::Discrepancy(args) => commands::discrepancy::run(args),
        Command::Convergence(args) => commands::convergence::run(args),
        Command::Verify(args) => commands::verify::run(args),
    };
    std::process::exit(match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qmc: {e}");
            e.exit_code()
        }
    });
}

/// Unified command error with the documented exit-code mapping.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numerical(String),
    Lib(QmcError),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) | CliError::Lib(QmcError::NumericalConsistency(_)) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<QmcError> for CliError {
    fn from(e: QmcError) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CmdResult = Result<i32, CliError>;
