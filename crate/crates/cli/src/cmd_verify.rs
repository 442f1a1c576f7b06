//! `permoracle verify`: run a named invariant suite and report pass/fail per
//! check.

use clap::Args;
use permoracle::verify;

use crate::{Failure, WorkerArgs};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suite name: lemmas, statevec, srm, sweep, nogo, or all.
    #[arg(long)]
    suite: String,
    #[command(flatten)]
    workers: WorkerArgs,
}

pub fn run(args: VerifyArgs) -> Result<(), Failure> {
    let workers = args.workers.resolve(None);
    let outcomes = verify::run_suite(&args.suite, workers).map_err(|e| match e {
        permoracle::Error::UnknownSuite(name) => Failure::Usage(format!(
            "unknown suite {name:?}; available: {}",
            verify::SUITES.join(", ")
        )),
        other => Failure::Run(other.to_string()),
    })?;
    let mut first_failure: Option<String> = None;
    for outcome in &outcomes {
        let status = if outcome.passed { "ok " } else { "FAIL" };
        println!(
            "[{}] {status} {}: {}",
            outcome.suite, outcome.name, outcome.detail
        );
        if !outcome.passed && first_failure.is_none() {
            first_failure = Some(format!("{}/{}", outcome.suite, outcome.name));
        }
    }
    match first_failure {
        None => {
            println!("{} checks passed", outcomes.len());
            Ok(())
        }
        Some(name) => Err(Failure::Run(format!("invariant {name} failed"))),
    }
}
