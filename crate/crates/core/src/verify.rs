//! Named invariant suites, runnable from the CLI.
//!
//! Each check re-derives an expectation independently (closed forms, dense
//! linear algebra, exhaustive enumeration) and compares the implementation
//! against it. Suites are kept fast enough to run routinely.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algo_a;
use crate::domain::{
    b1, distinct_concepts, BitString, HFunction, Permutation, SigmaAssignment,
};
use crate::error::{Error, Result};
use crate::nogo;
use crate::srm;
use crate::statevec::{ResponseState, StateVector};
use crate::sweep::{self, AssignmentEvaluator, OptimizerConfig, SweepConfig, VecSink};

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub const SUITES: &[&str] = &["lemmas", "statevec", "srm", "sweep", "nogo", "all"];

type Check = (&'static str, fn(usize) -> std::result::Result<String, String>);

fn suite_checks(suite: &str) -> Option<Vec<(&'static str, Check)>> {
    let lemmas: Vec<Check> = vec![
        ("concept-counting", check_concept_counting),
        ("weight-parity-identity", check_weight_parity_identity),
        ("sign-factorization", check_sign_factorization),
        ("b1-alternation", check_b1_alternation),
        ("hat-bijectivity", check_hat_bijectivity),
    ];
    let statevec: Vec<Check> = vec![
        ("norm-preservation", check_norm_preservation),
        ("walsh-dense-agreement", check_walsh_dense_agreement),
        ("oracle-gauge-homomorphism", check_oracle_gauge_homomorphism),
    ];
    let srm_suite: Vec<Check> = vec![
        ("helstrom-agreement", check_helstrom_agreement),
        ("sqrt-reconstruction", check_sqrt_reconstruction),
        ("route-agreement", check_route_agreement),
        ("unit-probability-criterion", check_unit_probability_criterion),
    ];
    let sweep_suite: Vec<Check> = vec![
        ("determinism", check_sweep_determinism),
        ("partition-soundness", check_partition_soundness),
        ("gauge-objective-invariance", check_gauge_objective_invariance),
        ("response-dimension-monotonicity", check_monotonicity),
        ("optimizer-sanity", check_optimizer_sanity),
    ];
    let nogo_suite: Vec<Check> = vec![
        ("scan-counts", check_scan_counts),
        ("hadamard-objective-bridge", check_hadamard_objective_bridge),
        ("complementary-row-degeneracy", check_complementary_rows),
    ];
    let tag = |suite: &'static str, checks: Vec<Check>| -> Vec<(&'static str, Check)> {
        checks.into_iter().map(|c| (suite, c)).collect()
    };
    match suite {
        "lemmas" => Some(tag("lemmas", lemmas)),
        "statevec" => Some(tag("statevec", statevec)),
        "srm" => Some(tag("srm", srm_suite)),
        "sweep" => Some(tag("sweep", sweep_suite)),
        "nogo" => Some(tag("nogo", nogo_suite)),
        "all" => {
            let mut all = tag("lemmas", lemmas);
            all.extend(tag("statevec", statevec));
            all.extend(tag("srm", srm_suite));
            all.extend(tag("sweep", sweep_suite));
            all.extend(tag("nogo", nogo_suite));
            Some(all)
        }
        _ => None,
    }
}

/// Runs a named suite; `workers` bounds internal sweep/scan parallelism.
pub fn run_suite(suite: &str, workers: usize) -> Result<Vec<CheckOutcome>> {
    let checks =
        suite_checks(suite).ok_or_else(|| Error::UnknownSuite(suite.to_string()))?;
    Ok(checks
        .into_iter()
        .map(|(suite, (name, f))| match f(workers) {
            Ok(detail) => CheckOutcome {
                suite,
                name,
                passed: true,
                detail,
            },
            Err(detail) => CheckOutcome {
                suite,
                name,
                passed: false,
                detail,
            },
        })
        .collect())
}

// ---------------------------------------------------------------- lemmas --

fn check_concept_counting(_: usize) -> std::result::Result<String, String> {
    for n in 2..=9usize {
        let h = HFunction::b1(n).map_err(|e| e.to_string())?;
        let got = distinct_concepts(&h).map_err(|e| e.to_string())?;
        let expect = if n % 4 == 1 { 1 << (n - 1) } else { 1 << n };
        if got != expect {
            return Err(format!("n={n}: {got} concepts, expected {expect}"));
        }
    }
    Ok("b1 concept counts match for n in 2..=9".into())
}

fn check_weight_parity_identity(_: usize) -> std::result::Result<String, String> {
    for n in 1..=8usize {
        for a in BitString::all(n).map_err(|e| e.to_string())? {
            for x in BitString::all(n).map_err(|e| e.to_string())? {
                let lhs = (a.dot(&x).unwrap() as u32 + a.weight() * x.weight()) % 2;
                let rhs = a.dot(&x.hat()).unwrap() as u32;
                if lhs != rhs {
                    return Err(format!("fails at n={n}, a={a}, x={x}"));
                }
            }
        }
    }
    Ok("a.x + wt(a)wt(x) = a.hat(x) mod 2, exhaustive n <= 8".into())
}

fn check_sign_factorization(_: usize) -> std::result::Result<String, String> {
    for n in 1..=8usize {
        for a in BitString::all(n).map_err(|e| e.to_string())? {
            for x in BitString::all(n).map_err(|e| e.to_string())? {
                let (lhs, rhs) = algo_a::phase_identity(&a, &x).map_err(|e| e.to_string())?;
                if lhs != rhs {
                    return Err(format!("fails at n={n}, a={a}, x={x}"));
                }
            }
        }
    }
    Ok("sign factorization exhaustive for n <= 8".into())
}

fn check_b1_alternation(_: usize) -> std::result::Result<String, String> {
    for d in 0..=100u32 {
        if b1(d + 2) == b1(d) {
            return Err(format!("b1({}) == b1({d})", d + 2));
        }
    }
    Ok("b1(d+2) != b1(d) for d <= 100".into())
}

fn check_hat_bijectivity(_: usize) -> std::result::Result<String, String> {
    for n in 1..=7usize {
        let images: std::collections::HashSet<_> = BitString::all(n)
            .map_err(|e| e.to_string())?
            .map(|x| x.hat())
            .collect();
        let bijective = images.len() == 1 << n;
        if (n % 2 == 0) != bijective {
            return Err(format!("hat bijectivity wrong at n={n}"));
        }
        if n % 2 == 0 {
            for x in BitString::all(n).map_err(|e| e.to_string())? {
                if x.hat().hat() != x {
                    return Err(format!("hat not involutive at n={n}, x={x}"));
                }
            }
        }
    }
    Ok("hat bijective iff n even, involutive there, n <= 7".into())
}

// -------------------------------------------------------------- statevec --

fn random_unit(r: usize, rng: &mut ChaCha8Rng) -> ResponseState {
    ResponseState::normalized(
        (0..r)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )
    .expect("nonzero with overwhelming probability")
}

fn random_sigma(n: usize, r: usize, rng: &mut ChaCha8Rng) -> SigmaAssignment {
    let total = SigmaAssignment::total(n, r).expect("small");
    let idx = (rng.random_range(0..u64::MAX) as u128 % total) as u64;
    SigmaAssignment::from_index(idx, n, r).expect("in range")
}

fn check_norm_preservation(_: usize) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..60 {
        let n = rng.random_range(1..=8usize);
        let r = rng.random_range(1..=4usize);
        let psi = random_unit(r, &mut rng);
        let mut state = StateVector::prepare_query(n, &psi).map_err(|e| e.to_string())?;
        // The operations assert a 1e-12 norm drift internally; driving them
        // here makes the property suite fail loudly if that ever regresses.
        state.apply_walsh_hadamard();
        state.apply_phase_d();
        if n % 2 == 0 {
            state.apply_hat_p().map_err(|e| e.to_string())?;
        }
        let a = BitString::new(rng.random_range(0..(1usize << n)), n).unwrap();
        state
            .apply_oracle(&a, &random_sigma(n, r, &mut rng))
            .map_err(|e| e.to_string())?;
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(format!("case {case}: norm {norm}"));
        }
        let sum: f64 = state.query_marginal().iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(format!("case {case}: marginal sums to {sum}"));
        }
    }
    Ok("norm within 1e-12 across operations, 60 random cases".into())
}

fn check_walsh_dense_agreement(_: usize) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for n in 1..=4usize {
        let r = rng.random_range(1..=3usize);
        let psi = random_unit(r, &mut rng);
        let a = BitString::new(rng.random_range(0..(1usize << n)), n).unwrap();
        let mut state = StateVector::basis_query(&a, &psi).map_err(|e| e.to_string())?;
        let before = state.amplitudes().to_vec();
        state.apply_walsh_hadamard();
        let size = 1usize << n;
        let scale = (size as f64).sqrt().recip();
        for x in 0..size {
            for b in 0..r {
                let mut expect = Complex64::ZERO;
                for y in 0..size {
                    let sign = if (x & y).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    expect += before[y * r + b] * sign * scale;
                }
                let got = state.amplitude(x, b);
                if (got - expect).norm() > 1e-12 {
                    return Err(format!("n={n}: mismatch at (x={x}, b={b})"));
                }
            }
        }
    }
    Ok("fast transform matches the dense Hadamard matrix for n <= 4".into())
}

fn check_oracle_gauge_homomorphism(_: usize) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for case in 0..50 {
        let n = rng.random_range(1..=5usize);
        let r = 3;
        let sigma = random_sigma(n, r, &mut rng);
        let pi = Permutation::from_lex_rank(rng.random_range(0..6), r).unwrap();
        let psi = random_unit(r, &mut rng);
        let a = BitString::new(rng.random_range(0..(1usize << n)), n).unwrap();
        let mut plain = StateVector::prepare_query(n, &psi).map_err(|e| e.to_string())?;
        plain.apply_oracle(&a, &sigma).map_err(|e| e.to_string())?;
        let mut moved = StateVector::prepare_query(
            n,
            &psi.permuted(&pi.inverse()).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        moved
            .apply_oracle(&a, &sigma.right_compose(&pi).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        if plain.amplitudes() != moved.amplitudes() {
            return Err(format!("case {case}: gauge motion not exact"));
        }
    }
    Ok("right-composition gauge is entrywise exact, 50 random cases".into())
}

// ------------------------------------------------------------------- srm --

fn check_helstrom_agreement(_: usize) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for case in 0..1000 {
        let n = rng.random_range(1..=3usize);
        let r = rng.random_range(2..=3usize);
        let b = srm::build_state_matrix(n, &random_sigma(n, r, &mut rng), &random_unit(r, &mut rng))
            .map_err(|e| e.to_string())?;
        let i = rng.random_range(0..b.states());
        let mut j = rng.random_range(0..b.states());
        while j == i {
            j = rng.random_range(0..b.states());
        }
        let overlap = b.column(i).dotc(&b.column(j));
        let sub = nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::ONE, overlap, overlap.conj(), Complex64::ONE],
        );
        let srm_value = srm::srm_probability(&srm::GramMatrix::new(sub).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let modulus = overlap.norm().min(1.0);
        if modulus > 1.0 - 1e-9 {
            // Identical states up to rounding; the exact answer is 1/2.
            if (srm_value.probability - 0.5).abs() > 1e-9 {
                return Err(format!(
                    "case {case}: degenerate pair scored {}",
                    srm_value.probability
                ));
            }
            continue;
        }
        let helstrom = srm::helstrom_two_state(modulus).map_err(|e| e.to_string())?;
        if (srm_value.probability - helstrom).abs() > 1e-9 {
            return Err(format!(
                "case {case}: srm {} vs helstrom {helstrom}",
                srm_value.probability
            ));
        }
    }
    Ok("square-root measurement meets the two-state closed form, 1000 pairs".into())
}

fn check_sqrt_reconstruction(_: usize) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(113);
    for case in 0..5 {
        let dim = 64;
        let a = nalgebra::DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let g = a.adjoint() * &a;
        let s = srm::psd_sqrt(&g).map_err(|e| e.to_string())?;
        let rel = (&s * &s - &g).norm() / g.norm();
        if rel > 1e-8 {
            return Err(format!("case {case}: relative error {rel:.3e}"));
        }
    }
    Ok("sqrt(G)^2 reconstructs G within 1e-8 relative, 64x64 x5".into())
}

fn check_route_agreement(_: usize) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(127);
    for case in 0..100 {
        let n = rng.random_range(1..=4usize);
        let r = rng.random_range(1..=4usize);
        let sigma = random_sigma(n, r, &mut rng);
        let psi = random_unit(r, &mut rng);
        let mut eval = AssignmentEvaluator::new(n, &sigma).map_err(|e| e.to_string())?;
        let fast = eval.evaluate_response(&psi).map_err(|e| e.to_string())?;
        let dense = srm::discriminate(&srm::build_state_matrix(n, &sigma, &psi).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        if (fast.srm_probability - dense.probability).abs() > 1e-10 {
            return Err(format!(
                "case {case}: spectral {} vs dense {}",
                fast.srm_probability, dense.probability
            ));
        }
        if fast.rank != dense.rank {
            return Err(format!(
                "case {case}: spectral rank {} vs dense rank {}",
                fast.rank, dense.rank
            ));
        }
    }
    Ok("spectral objective equals the dense route, 100 random instances".into())
}

fn check_unit_probability_criterion(_: usize) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(131);
    for case in 0..60 {
        let n = rng.random_range(1..=4usize);
        let r = rng.random_range(1..=4usize);
        let b = srm::build_state_matrix(n, &random_sigma(n, r, &mut rng), &random_unit(r, &mut rng))
            .map_err(|e| e.to_string())?;
        let g = srm::gram(&b).map_err(|e| e.to_string())?;
        let value = srm::srm_probability(&g).map_err(|e| e.to_string())?;
        if !(0.0..=1.0 + 1e-12).contains(&value.probability) {
            return Err(format!("case {case}: probability {}", value.probability));
        }
        let near_identity = g.max_deviation_from_identity() <= 1e-8;
        let near_one = value.probability >= 1.0 - 1e-9;
        if near_identity != near_one {
            return Err(format!(
                "case {case}: identity-gram {near_identity} but probability {}",
                value.probability
            ));
        }
    }
    Ok("probability in [0,1]; equals 1 iff the Gram matrix is the identity".into())
}

// ----------------------------------------------------------------- sweep --

fn quick_cfg(n: usize, r: usize) -> SweepConfig {
    let mut cfg = SweepConfig::new(n, r);
    cfg.starts = 10;
    cfg
}

fn check_sweep_determinism(workers: usize) -> std::result::Result<String, String> {
    let cfg = quick_cfg(3, 2);
    let mut a = VecSink::default();
    let mut b = VecSink::default();
    sweep::sweep_assignments(&cfg, 1, &mut a).map_err(|e| e.to_string())?;
    sweep::sweep_assignments(&cfg, workers.max(2), &mut b).map_err(|e| e.to_string())?;
    if a.records != b.records {
        return Err("records differ between runs".into());
    }
    let bytes_a = serde_json::to_string(&a.records).map_err(|e| e.to_string())?;
    let bytes_b = serde_json::to_string(&b.records).map_err(|e| e.to_string())?;
    if bytes_a != bytes_b {
        return Err("serialized records differ between runs".into());
    }
    Ok("identical records and order across runs and worker counts".into())
}

fn check_partition_soundness(workers: usize) -> std::result::Result<String, String> {
    let full_cfg = quick_cfg(3, 2);
    let mut full = VecSink::default();
    let report = sweep::sweep_assignments(&full_cfg, workers.max(1), &mut full)
        .map_err(|e| e.to_string())?;
    let mut merged = Vec::new();
    for part in 0..8u64 {
        let cfg = quick_cfg(3, 2).with_range(part * 2, (part + 1) * 2);
        let mut sink = VecSink::default();
        sweep::sweep_assignments(&cfg, 1, &mut sink).map_err(|e| e.to_string())?;
        merged.extend(sink.records);
    }
    merged.sort_by_key(|r| r.assignment_index);
    if merged != full.records {
        return Err("union of 8 partitions differs from the full run".into());
    }
    let best = merged
        .iter()
        .map(|r| r.probability)
        .fold(f64::NEG_INFINITY, f64::max);
    if best != report.best_probability {
        return Err(format!(
            "partition best {best} vs full best {}",
            report.best_probability
        ));
    }
    Ok("8-way partition reproduces the full run's records and best".into())
}

fn check_gauge_objective_invariance(_: usize) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(137);
    for case in 0..100 {
        let n = 3;
        let r = 3;
        let sigma = random_sigma(n, r, &mut rng);
        let pi = Permutation::from_lex_rank(rng.random_range(0..6), r).unwrap();
        let psi = random_unit(r, &mut rng);
        let p0 = sweep::objective(n, &sigma, &psi).map_err(|e| e.to_string())?;
        let p1 = sweep::objective(
            n,
            &sigma.right_compose(&pi).map_err(|e| e.to_string())?,
            &psi.permuted(&pi.inverse()).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        if p0.to_bits() != p1.to_bits() {
            return Err(format!("case {case}: {p0} vs {p1} not bitwise equal"));
        }
    }
    Ok("objective bitwise invariant under the gauge motion, 100 triples".into())
}

fn check_monotonicity(workers: usize) -> std::result::Result<String, String> {
    let mut sink = VecSink::default();
    let p2 = sweep::sweep_assignments(&quick_cfg(3, 2), workers.max(1), &mut sink)
        .map_err(|e| e.to_string())?
        .best_probability;
    let mut sink = VecSink::default();
    let p3 = sweep::sweep_assignments(&quick_cfg(3, 3), workers.max(1), &mut sink)
        .map_err(|e| e.to_string())?
        .best_probability;
    // The additive degree-4 action attains 1, so best(3,4) = 1 without a
    // (4!)^4-point sweep.
    let additive = SigmaAssignment::additive(3, 4).map_err(|e| e.to_string())?;
    let p4 = sweep::optimize_psi(3, &additive, &OptimizerConfig::default())
        .map_err(|e| e.to_string())?
        .probability;
    if !(p2 <= p3 + 1e-9 && p3 <= p4 + 1e-9) {
        return Err(format!("not nondecreasing: p(2)={p2}, p(3)={p3}, p(4)={p4}"));
    }
    if (p4 - 1.0).abs() > 1e-6 {
        return Err(format!("degree-4 additive action reached only {p4}"));
    }
    if p3 >= 1.0 - 1e-6 {
        return Err(format!("p(3)={p3} should stay below 1"));
    }
    Ok(format!(
        "best is nondecreasing in r: {p2:.3} <= {p3:.3} <= {p4:.3}"
    ))
}

fn check_optimizer_sanity(_: usize) -> std::result::Result<String, String> {
    for n in [2usize, 4] {
        let sigma = SigmaAssignment::b1_assignment(n).map_err(|e| e.to_string())?;
        let cfg = OptimizerConfig::default();
        let mut eval = AssignmentEvaluator::new(n, &sigma).map_err(|e| e.to_string())?;
        for start in 0..cfg.starts {
            let coords =
                sweep::optimizer::sample_start(cfg.seed, sigma.index(), start, eval.coord_dim());
            let (_, value) = sweep::optimizer::run_single_start(&mut eval, &cfg, coords);
            if value < 1.0 - cfg.ftol {
                return Err(format!("n={n}, start {start} stalled at {value}"));
            }
        }
    }
    Ok("every start reaches probability 1 on the b1 assignment, n in {2,4}".into())
}

// ------------------------------------------------------------------ nogo --

fn check_scan_counts(workers: usize) -> std::result::Result<String, String> {
    for n in 2..=6usize {
        let report = nogo::scan_all_h(n, workers.max(1)).map_err(|e| e.to_string())?;
        let expect = if n % 2 == 0 { 4 } else { 0 };
        if report.passing.len() != expect {
            return Err(format!(
                "n={n}: {} passing functions, expected {expect}",
                report.passing.len()
            ));
        }
        for p in &report.passing {
            if p.translate_shift.is_none() {
                return Err(format!("n={n}: passing h={} is not a translate", p.h));
            }
        }
    }
    Ok("scans for n in 2..=6: four translates pass at even n, none at odd".into())
}

fn check_hadamard_objective_bridge(_: usize) -> std::result::Result<String, String> {
    // Hadamardness of the learning matrix coincides with a unit objective
    // for the +- phase query at psi = |->, for every h at even n <= 6.
    let swap = Permutation::from_one_line(&[2, 1]).map_err(|e| e.to_string())?;
    let minus = ResponseState::minus();
    for n in [2usize, 4, 6] {
        for idx in 0..(1u32 << (n + 1)) {
            let h = HFunction::from_index(idx, n).map_err(|e| e.to_string())?;
            let matrix = nogo::learning_matrix(&h).map_err(|e| e.to_string())?;
            let hadamard = nogo::is_hadamard(&matrix);
            let perms = (0..=n)
                .map(|d| swap.power(h.value(d) as u32))
                .collect::<Vec<_>>();
            let sigma = SigmaAssignment::new(perms).map_err(|e| e.to_string())?;
            let p = sweep::objective(n, &sigma, &minus).map_err(|e| e.to_string())?;
            if hadamard != (p >= 1.0 - 1e-9) {
                return Err(format!(
                    "n={n}, h={h}: hadamard={hadamard} but objective={p}"
                ));
            }
        }
    }
    Ok("Hadamard learning matrix iff unit objective with psi = |->, even n <= 6".into())
}

fn check_complementary_rows(_: usize) -> std::result::Result<String, String> {
    for n in [3usize, 5, 7] {
        for s in 0u8..4 {
            let h = HFunction::new(
                &(0..=n as u32)
                    .map(|d| b1(d + s as u32))
                    .collect::<Vec<_>>(),
            )
            .map_err(|e| e.to_string())?;
            let m = nogo::learning_matrix(&h).map_err(|e| e.to_string())?;
            let full = (1usize << n) - 1;
            let eps = m.entry(0, 0) * m.entry(full, 0);
            for x in 0..(1usize << n) {
                for a in 0..(1usize << n) {
                    if m.entry(x, a) != eps * m.entry(x ^ full, a) {
                        return Err(format!("n={n}, s={s}: rows {x} vs its complement"));
                    }
                }
            }
        }
    }
    Ok("complement rows equal up to one global sign for translates, odd n <= 7".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run_suite("nosuch", 1), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn suite_names_resolve() {
        for suite in SUITES {
            assert!(suite_checks(suite).is_some(), "{suite}");
        }
    }

    #[test]
    fn lemmas_suite_passes() {
        let outcomes = run_suite("lemmas", 2).unwrap();
        for o in &outcomes {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
    }
}
