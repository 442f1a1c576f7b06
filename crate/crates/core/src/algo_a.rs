//! The exact single-query learning pipeline for the second-bit-of-distance
//! concept class, plus the phase identity that makes each stage checkable.
//!
//! The oracle inside the pipeline goes through the generic permutation-model
//! machinery with the d -> (12)^{b1(d)} assignment, so a probability-1 run
//! also exercises the oracle code path end to end.

use num_complex::Complex64;

use crate::domain::{b1, BitString, SigmaAssignment};
use crate::error::{Error, Result};
use crate::statevec::{ResponseState, StateVector};

/// Outcome of one exact run.
#[derive(Clone, Debug)]
pub struct AlgorithmARun {
    pub n: usize,
    pub a: BitString,
    /// Probability of each query-register outcome, indexed by packed value.
    pub outcome_distribution: Vec<f64>,
    /// Inner product with |a> (x) |->; the run leaves a pure +-1 phase.
    pub final_phase: Complex64,
}

impl AlgorithmARun {
    pub fn probability_of_hidden(&self) -> f64 {
        self.outcome_distribution[self.a.value()]
    }
}

/// Outcome of the odd-width variant, which pins down the hidden string up
/// to complementation.
#[derive(Clone, Debug)]
pub struct AlgorithmAPairRun {
    pub n: usize,
    /// The unordered pair {a, complement(a)}, smaller packed value first.
    pub pair: (BitString, BitString),
    pub outcome_distribution: Vec<f64>,
    /// Total probability carried by the pair.
    pub pair_probability: f64,
}

/// Runs the seven-step pipeline for even n: prepare the equal-superposition
/// query with the response register in |->, apply the b1-weight phase, query
/// the oracle once, undo the phases through the hat permutation, and rotate
/// back with the Walsh-Hadamard transform. The outcome distribution is a
/// point mass at a with global phase (-1)^{b1(wt a)}.
pub fn run_algorithm_a(a: &BitString) -> Result<AlgorithmARun> {
    let n = a.n();
    if n % 2 != 0 {
        return Err(Error::OddWidth("run_algorithm_a", n));
    }
    let psi = ResponseState::minus();
    // Steps 1-2: |0..0>|0> then H^(x n) (x) HX, i.e. |eta^0>|->.
    let mut state = StateVector::prepare_query(n, &psi)?;
    // Step 3.
    state.apply_phase_d();
    // Step 4: one oracle call.
    state.apply_oracle(a, &SigmaAssignment::b1_assignment(n)?)?;
    // Step 5.
    state.apply_hat_p()?;
    // Step 6.
    state.apply_walsh_hadamard();
    // Step 7.
    let outcome_distribution = state.query_marginal();
    let final_phase = phase_against_target(&state, a);
    Ok(AlgorithmARun {
        n,
        a: *a,
        outcome_distribution,
        final_phase,
    })
}

/// Odd-width variant: identical pipeline minus the hat permutation. The
/// measurement then lands on hat(a), the even-weight member of
/// {a, complement(a)}, so the pair is identified with probability 1.
pub fn run_algorithm_a_pair(a: &BitString) -> Result<AlgorithmAPairRun> {
    let n = a.n();
    if n % 2 == 0 {
        return Err(Error::EvenWidth("run_algorithm_a_pair", n));
    }
    let psi = ResponseState::minus();
    let mut state = StateVector::prepare_query(n, &psi)?;
    state.apply_phase_d();
    state.apply_oracle(a, &SigmaAssignment::b1_assignment(n)?)?;
    state.apply_walsh_hadamard();
    let outcome_distribution = state.query_marginal();
    let comp = a.complement();
    let pair = if a.value() <= comp.value() {
        (*a, comp)
    } else {
        (comp, *a)
    };
    let pair_probability =
        outcome_distribution[pair.0.value()] + outcome_distribution[pair.1.value()];
    Ok(AlgorithmAPairRun {
        n,
        pair,
        outcome_distribution,
        pair_probability,
    })
}

/// Both sides of the sign identity
/// (-1)^{b1(dist(a,x))} = (-1)^{b1(wt a)} (-1)^{b1(wt x)} (-1)^{a.hat(x)},
/// evaluated independently from their defining formulas.
pub fn phase_identity(a: &BitString, x: &BitString) -> Result<(i32, i32)> {
    let d = crate::domain::hamming_distance(a, x)?;
    let lhs = sign(b1(d));
    let rhs = sign(b1(a.weight())) * sign(b1(x.weight())) * sign(a.dot(&x.hat())?);
    Ok((lhs, rhs))
}

fn sign(bit: u8) -> i32 {
    if bit == 0 {
        1
    } else {
        -1
    }
}

fn phase_against_target(state: &StateVector, a: &BitString) -> Complex64 {
    let minus = ResponseState::minus();
    let mut ip = Complex64::ZERO;
    for b in 0..state.r() {
        ip += minus.entries()[b].conj() * state.amplitude(a.value(), b);
    }
    ip
}
