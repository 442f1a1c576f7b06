//! Scratch probe: full gauge-reduced sweep at n = 5, r = 3; search the tie
//! set for a record whose optimal response state matches the printed one.

use num_complex::Complex64;
use permoracle::statevec::ResponseState;
use permoracle::sweep::{sweep_assignments, SweepConfig, VecSink};
use std::time::Instant;

fn main() {
    let mut cfg = SweepConfig::new(5, 3);
    cfg.gauge_reduce = true;
    cfg.index_range = Some((0, 7776));
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let t0 = Instant::now();
    let mut sink = VecSink::default();
    let report = sweep_assignments(&cfg, workers, &mut sink).unwrap();
    println!(
        "best {:.9}, ties {}, evaluated {}, wall {:?}",
        report.best_probability,
        report.optima.len(),
        report.totals.evaluated,
        t0.elapsed()
    );

    let listed = ["(1)", "(123)", "(132)", "(12)", "(1)", "(123)"];
    let listed_hit = report
        .optima
        .iter()
        .any(|r| r.sigma.iter().map(String::as_str).eq(listed.iter().copied()));
    println!("listed assignment in tie set: {listed_hit}");

    let paper = ResponseState::normalized(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -0.1065),
        Complex64::new(0.0, 1.1064),
    ])
    .unwrap();
    let mut best_overlap = 0.0f64;
    let mut best_sigma: Vec<String> = Vec::new();
    for rec in &report.optima {
        let psi = ResponseState::normalized(
            rec.psi_star
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .unwrap();
        let conj = ResponseState::normalized(
            psi.entries().iter().map(|z| z.conj()).collect(),
        )
        .unwrap();
        let o = psi.overlap(&paper).unwrap().max(conj.overlap(&paper).unwrap());
        if o > best_overlap {
            best_overlap = o;
            best_sigma = rec.sigma.clone();
        }
    }
    println!(
        "max overlap with printed state across {} ties: {:.6} at {}",
        report.optima.len(),
        best_overlap,
        best_sigma.join(",")
    );

    // Moduli patterns represented in the tie set.
    let mut patterns: std::collections::BTreeMap<String, usize> = Default::default();
    for rec in &report.optima {
        let mut mods: Vec<f64> = rec
            .psi_star
            .iter()
            .map(|&(re, im)| (re * re + im * im).sqrt())
            .collect();
        mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let key = format!("{:.4},{:.4},{:.4}", mods[0], mods[1], mods[2]);
        *patterns.entry(key).or_default() += 1;
    }
    for (pattern, count) in patterns {
        println!("  moduli [{pattern}] x{count}");
    }
}
