//! Batch front end: run the exact identification pipeline, assignment
//! sweeps, function scans, and verification suites. Stdout carries human
//! tables; files carry machine records behind a manifest header.
//!
//! Exit codes: 0 success, 1 computational or I/O failure, 2 usage error.

use clap::{Args, Parser, Subcommand};

mod cmd_algoa;
mod cmd_scan;
mod cmd_sweep;
mod cmd_verify;
mod config;
mod docs;

/// Failures carry their exit code class.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or configuration: exit 2.
    Usage(String),
    /// Computation, assertion, or I/O failure: exit 1.
    Run(String),
}

impl From<permoracle::Error> for Failure {
    fn from(e: permoracle::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "permoracle",
    version,
    about = "Single-query learning from Hamming-distance oracles in the permutation model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact single-query identification pipeline.
    Algoa(cmd_algoa::AlgoaArgs),
    /// Enumerate permutation assignments and maximize success probability.
    Sweep(cmd_sweep::SweepArgs),
    /// Scan all binary functions of the Hamming distance at one width.
    #[command(name = "scan-h")]
    ScanH(cmd_scan::ScanArgs),
    /// Run a named invariant suite.
    Verify(cmd_verify::VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct WorkerArgs {
    /// Worker threads; defaults to PERMORACLE_WORKERS or the CPU count.
    #[arg(long)]
    workers: Option<usize>,
}

impl WorkerArgs {
    pub fn resolve(&self, from_config: Option<usize>) -> usize {
        self.workers
            .or(from_config)
            .or_else(|| {
                std::env::var("PERMORACLE_WORKERS")
                    .ok()
                    .and_then(|s| s.parse().ok())
            })
            .unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            })
            .max(1)
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Algoa(args) => cmd_algoa::run(args),
        Command::Sweep(args) => cmd_sweep::run(args),
        Command::ScanH(args) => cmd_scan::run(args),
        Command::Verify(args) => cmd_verify::run(args),
    };
    match result {
        Ok(()) => {}
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    }
}
