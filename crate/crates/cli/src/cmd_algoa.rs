//! `permoracle algoa`: exact identification of a hidden string from one
//! oracle query.

use std::path::PathBuf;

use clap::Args;
use permoracle::algo_a;
use permoracle::domain::BitString;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::docs::{fmt_prob, manifest_for, write_document};
use crate::Failure;

#[derive(Args, Debug)]
pub struct AlgoaArgs {
    /// Query width; must be even unless --pair-mode is set.
    #[arg(long)]
    n: usize,
    /// Hidden string as 0/1 characters.
    #[arg(long)]
    a: String,
    /// Width 1 mod 4 variant: identify {a, complement(a)} instead of a.
    #[arg(long, default_value_t = false)]
    pair_mode: bool,
    /// Sample this many measurement outcomes from the exact distribution.
    #[arg(long)]
    trials: Option<u64>,
    /// Seed for outcome sampling.
    #[arg(long, default_value_t = 1729)]
    seed: u64,
    /// Write the result document here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Debug, Clone)]
struct TrialCount {
    outcome: String,
    count: u64,
}

#[derive(Serialize, Debug)]
struct AlgoaDocument {
    n: usize,
    a: String,
    pair_mode: bool,
    /// Pr[a], or the pair probability in pair mode.
    probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_phase: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pair: Option<(String, String)>,
    /// Outcomes with probability above 1e-12, most likely first.
    top_outcomes: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<Vec<TrialCount>>,
}

pub fn run(args: AlgoaArgs) -> Result<(), Failure> {
    let a: BitString = args
        .a
        .parse()
        .map_err(|e: permoracle::Error| Failure::Usage(e.to_string()))?;
    if a.n() != args.n {
        return Err(Failure::Usage(format!(
            "--a has {} bits but --n is {}",
            a.n(),
            args.n
        )));
    }
    if args.pair_mode {
        if args.n % 4 != 1 {
            return Err(Failure::Usage(format!(
                "--pair-mode targets widths n = 1 mod 4, got n = {}",
                args.n
            )));
        }
    } else if args.n % 2 != 0 {
        return Err(Failure::Usage(format!(
            "the exact pipeline needs an even width (the hat map is a bijection \
             only for even n); n = {} requires --pair-mode",
            args.n
        )));
    }

    let (distribution, probability, final_phase, pair) = if args.pair_mode {
        let run = algo_a::run_algorithm_a_pair(&a)?;
        let pair = (run.pair.0.to_string(), run.pair.1.to_string());
        let p = run.pair_probability;
        (run.outcome_distribution, p, None, Some(pair))
    } else {
        let run = algo_a::run_algorithm_a(&a)?;
        let phase = (run.final_phase.re, run.final_phase.im);
        let p = run.probability_of_hidden();
        (run.outcome_distribution, p, Some(phase), None)
    };

    let mut top: Vec<(String, f64)> = distribution
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 1e-12)
        .map(|(x, &p)| {
            let s = BitString::new(x, args.n).expect("index in range").to_string();
            (s, permoracle::sweep::round_sig12(p))
        })
        .collect();
    top.sort_by(|l, r| r.1.partial_cmp(&l.1).unwrap().then_with(|| l.0.cmp(&r.0)));
    top.truncate(8);

    let trials = args.trials.map(|count| sample(&distribution, args.n, count, args.seed));

    println!("width n = {}, hidden a = {}", args.n, args.a);
    if let Some((p0, p1)) = &pair {
        println!("pair {{{p0}, {p1}}} identified with probability {}", fmt_prob(probability));
    } else {
        println!("Pr[measure a] = {}", fmt_prob(probability));
        if let Some((re, im)) = final_phase {
            println!("final phase   = {re:+.6}{im:+.6}i");
        }
    }
    for (outcome, p) in &top {
        println!("  outcome {outcome}  p = {}", fmt_prob(*p));
    }
    if let Some(counts) = &trials {
        println!("sampled {} trials (seed {}):", args.trials.unwrap(), args.seed);
        for t in counts {
            println!("  {} observed {} times", t.outcome, t.count);
        }
    }

    let document = AlgoaDocument {
        n: args.n,
        a: args.a.clone(),
        pair_mode: args.pair_mode,
        probability: permoracle::sweep::round_sig12(probability),
        final_phase,
        pair,
        top_outcomes: top,
        trials,
    };
    if let Some(out) = &args.out {
        let manifest = manifest_for(
            "algoa",
            serde_json::json!({
                "n": args.n,
                "a": args.a,
                "pair_mode": args.pair_mode,
                "trials": args.trials,
                "seed": args.seed,
            }),
            Some(args.seed),
            &[],
        )?;
        write_document(out, &manifest, &document)?;
        println!("wrote {}", out.display());
    }

    if probability >= 1.0 - 1e-9 {
        Ok(())
    } else {
        Err(Failure::Run(format!(
            "identification probability {} fell below 1 - 1e-9",
            fmt_prob(probability)
        )))
    }
}

fn sample(distribution: &[f64], n: usize, count: u64, seed: u64) -> Vec<TrialCount> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; distribution.len()];
    for _ in 0..count {
        let mut u: f64 = rng.random_range(0.0..1.0);
        let mut picked = distribution.len() - 1;
        for (x, &p) in distribution.iter().enumerate() {
            if u < p {
                picked = x;
                break;
            }
            u -= p;
        }
        counts[picked] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(x, count)| TrialCount {
            outcome: BitString::new(x, n).expect("in range").to_string(),
            count,
        })
        .collect()
}
