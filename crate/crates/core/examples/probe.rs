//! Scratch probe for the reported optima and sweep timings.

use num_complex::Complex64;
use permoracle::domain::{parse_cycles, SigmaAssignment};
use permoracle::statevec::ResponseState;
use permoracle::sweep::{optimize_psi, OptimizerConfig, SweepConfig, VecSink};
use std::time::Instant;

fn assignment(texts: &[&str], r: usize) -> SigmaAssignment {
    SigmaAssignment::new(
        texts
            .iter()
            .map(|t| parse_cycles(t, r).unwrap())
            .collect(),
    )
    .unwrap()
}

fn main() {
    let cfg = OptimizerConfig::default();

    // Reported optimum at n=3, r=3.
    let sigma = assignment(&["(1)", "(12)", "(132)", "(123)"], 3);
    let t0 = Instant::now();
    let out = optimize_psi(3, &sigma, &cfg).unwrap();
    println!(
        "n=3 r=3 listed: p = {:.9} rank {} ({} starts, {:?})",
        out.probability,
        out.rank,
        out.starts_used,
        t0.elapsed()
    );

    // Reported optimum at n=5, r=2.
    let sigma = assignment(&["(1)", "(12)", "(12)", "(1)", "(1)", "(1)"], 2);
    let out = optimize_psi(5, &sigma, &cfg).unwrap();
    println!("n=5 r=2 listed: p = {:.9} rank {}", out.probability, out.rank);

    // Reported optimum at n=5, r=3 plus the printed response state.
    let sigma = assignment(&["(1)", "(123)", "(132)", "(12)", "(1)", "(123)"], 3);
    let t0 = Instant::now();
    let out = optimize_psi(5, &sigma, &cfg).unwrap();
    let paper_psi = ResponseState::normalized(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -0.1065),
        Complex64::new(0.0, 1.1064),
    ])
    .unwrap();
    let overlap = out.psi_star.overlap(&paper_psi).unwrap();
    let conj = ResponseState::new(
        out.psi_star
            .entries()
            .iter()
            .map(|z| z.conj())
            .collect(),
    )
    .unwrap();
    let overlap_conj = conj.overlap(&paper_psi).unwrap();
    println!(
        "n=5 r=3 listed: p = {:.9} rank {} overlap {:.6} conj-overlap {:.6} ({:?})",
        out.probability,
        out.rank,
        overlap,
        overlap_conj,
        t0.elapsed()
    );
    println!("  psi* = {:?}", out.psi_star.entries());

    // Degree-4 additive saturation.
    for n in 2..=5 {
        let sigma = SigmaAssignment::additive(n, 4).unwrap();
        let out = optimize_psi(n, &sigma, &cfg).unwrap();
        println!("n={n} r=4 additive: p = {:.9} ({} starts)", out.probability, out.starts_used);
    }

    // Small sweep timings.
    let mut sweep_cfg = SweepConfig::new(3, 3);
    sweep_cfg.starts = 20;
    let t0 = Instant::now();
    let mut sink = VecSink::default();
    let report = permoracle::sweep::sweep_assignments(&sweep_cfg, 2, &mut sink).unwrap();
    println!(
        "sweep n=3 r=3 (1296): best {:.9}, ties {}, {:?}",
        report.best_probability,
        report.optima.len(),
        t0.elapsed()
    );
    for rec in report.optima.iter().take(12) {
        println!("  tie idx {:>5}: {} (rank {})", rec.assignment_index, rec.sigma.join(","), rec.rank);
    }

    let mut sweep_cfg = SweepConfig::new(5, 2);
    sweep_cfg.starts = 20;
    let t0 = Instant::now();
    let mut sink = VecSink::default();
    let report = permoracle::sweep::sweep_assignments(&sweep_cfg, 2, &mut sink).unwrap();
    println!(
        "sweep n=5 r=2 (64): best {:.9}, ties {}, {:?}",
        report.best_probability,
        report.optima.len(),
        t0.elapsed()
    );
    for rec in report.optima.iter().take(6) {
        println!("  tie idx {:>5}: {}", rec.assignment_index, rec.sigma.join(","));
    }
}
