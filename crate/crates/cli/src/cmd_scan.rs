//! `permoracle scan-h`: exhaustive scan over all binary functions of the
//! Hamming distance at one width.

use std::path::PathBuf;

use clap::Args;
use permoracle::nogo;

use crate::docs::{manifest_for, write_document};
use crate::{Failure, WorkerArgs};

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Query width (1..=12).
    #[arg(long)]
    n: usize,
    /// Write the scan report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    workers: WorkerArgs,
}

pub fn run(args: ScanArgs) -> Result<(), Failure> {
    let workers = args.workers.resolve(None);
    let report = nogo::scan_all_h(args.n, workers)?;

    println!(
        "scanned {} functions h : {{0..{}}} -> {{0,1}}",
        report.total_functions, args.n
    );
    println!(
        "passing (full concept class, Hadamard learning matrix): {}",
        report.passing.len()
    );
    for p in &report.passing {
        match p.translate_shift {
            Some(s) => println!("  h = {}  (second-bit function shifted by {s})", p.h),
            None => println!("  h = {}  (no translate classification)", p.h),
        }
    }
    println!(
        "degenerate concept classes (reported separately): {}",
        report.degenerate_h_indices.len()
    );

    if let Some(out) = &args.out {
        let manifest = manifest_for(
            "scan-h",
            serde_json::json!({ "n": args.n }),
            None,
            &[],
        )?;
        write_document(out, &manifest, &report)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
