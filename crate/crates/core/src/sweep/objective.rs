//! The per-assignment success-probability objective.
//!
//! For a fixed assignment the Gram matrix of oracle outputs satisfies
//! G_{a,a'} = gamma(wt(a xor a')) where
//! gamma(k) = 2^{-n} sum_z <sigma_{wt z} psi, sigma_{dist(e,z)} psi> for any
//! e of weight k (substitute x -> a xor z in the defining sum; pairing z with
//! e xor z shows gamma is real). Matrices of this XOR-circulant form are
//! diagonalized by the Walsh-Hadamard basis with eigenvalues
//! lambda(s) = sum_k gamma(k) K_k(wt s), K the Krawtchouk polynomials, and
//! sqrt(G) has the constant diagonal 2^{-n} sum_s sqrt(lambda(s)). The
//! square-root-measurement value therefore costs O(n^2 r) per evaluation
//! instead of a dense eigendecomposition; equality with the dense route in
//! [`crate::srm`] is pinned by tests.

use num_complex::Complex64;

use crate::domain::hfunction::binomial_row;
use crate::domain::SigmaAssignment;
use crate::error::{Error, Result};
use crate::statevec::ResponseState;

/// Relative eigenvalue cutoff for the numerical rank of G. The eigenvalues
/// here come from short exact sums, so true zeros sit at ~1e-15 while the
/// smallest genuine eigenvalues of deficient-vs-full ensembles are orders of
/// magnitude above this.
pub const EIG_RANK_REL_TOL: f64 = 1e-10;

/// Evaluates the sweep objective for one assignment; reusable across many
/// response states.
pub struct AssignmentEvaluator {
    n: usize,
    r: usize,
    /// images[d][b] = sigma_d(b), 0-based.
    images: Vec<Vec<u8>>,
    /// Pascal triangle rows 0..=n.
    pascal: Vec<Vec<u64>>,
    /// Krawtchouk table kraw[k][m] = sum_i (-1)^i C(m,i) C(n-m,k-i).
    kraw: Vec<Vec<i64>>,
    // Scratch buffers.
    psi: Vec<Complex64>,
    permuted: Vec<Complex64>,
    overlaps: Vec<Complex64>,
    gamma: Vec<f64>,
    lambda: Vec<f64>,
}

/// One objective evaluation.
#[derive(Clone, Copy, Debug)]
pub struct EvalOutcome {
    /// Raw square-root-measurement success probability.
    pub srm_probability: f64,
    pub rank: usize,
    pub rank_deficient: bool,
    /// min(srm_probability, rank / M) when rank-deficient, else the SRM value.
    pub objective: f64,
}

impl AssignmentEvaluator {
    pub fn new(n: usize, sigma: &SigmaAssignment) -> Result<Self> {
        if sigma.n() != n {
            return Err(Error::ShapeMismatch(format!(
                "assignment covers distances 0..={} but n = {}",
                sigma.n(),
                n
            )));
        }
        if n > 24 {
            return Err(Error::SizeLimit(format!(
                "objective needs n <= 24 for exact binomial sums, got {n}"
            )));
        }
        let r = sigma.r();
        let images = sigma
            .perms()
            .iter()
            .map(|p| p.images().to_vec())
            .collect();
        let pascal: Vec<Vec<u64>> = (0..=n).map(binomial_row).collect();
        let kraw = krawtchouk_table(n, &pascal);
        Ok(Self {
            n,
            r,
            images,
            pascal,
            kraw,
            psi: vec![Complex64::ZERO; r],
            permuted: vec![Complex64::ZERO; (n + 1) * r],
            overlaps: vec![Complex64::ZERO; (n + 1) * (n + 1)],
            gamma: vec![0.0; n + 1],
            lambda: vec![0.0; n + 1],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Real coordinate count of the search space (re, im per response axis).
    pub fn coord_dim(&self) -> usize {
        2 * self.r
    }

    /// Evaluates at interleaved (re, im) coordinates, normalizing internally.
    /// Returns None for a vector too close to zero to normalize.
    pub fn evaluate_coords(&mut self, coords: &[f64]) -> Option<EvalOutcome> {
        assert_eq!(coords.len(), 2 * self.r);
        let norm_sq: f64 = coords.iter().map(|c| c * c).sum();
        if !norm_sq.is_finite() || norm_sq < 1e-200 {
            return None;
        }
        let inv = norm_sq.sqrt().recip();
        for b in 0..self.r {
            self.psi[b] = Complex64::new(coords[2 * b] * inv, coords[2 * b + 1] * inv);
        }
        Some(self.evaluate_unit_psi())
    }

    pub fn evaluate_response(&mut self, psi: &ResponseState) -> Result<EvalOutcome> {
        if psi.dim() != self.r {
            return Err(Error::DegreeMismatch(psi.dim(), self.r));
        }
        self.psi.copy_from_slice(psi.entries());
        Ok(self.evaluate_unit_psi())
    }

    fn evaluate_unit_psi(&mut self) -> EvalOutcome {
        let n = self.n;
        let r = self.r;
        let width = n + 1;

        // u_d = P_{sigma_d} psi.
        for d in 0..width {
            let images = &self.images[d];
            let base = d * r;
            for b in 0..r {
                self.permuted[base + images[b] as usize] = self.psi[b];
            }
        }
        // overlaps[w][d] = <u_w, u_d>.
        for w in 0..width {
            for d in 0..width {
                let mut acc = Complex64::ZERO;
                let (uw, ud) = (&self.permuted[w * r..w * r + r], &self.permuted[d * r..d * r + r]);
                for b in 0..r {
                    acc += uw[b].conj() * ud[b];
                }
                self.overlaps[w * width + d] = acc;
            }
        }
        // gamma(k) = 2^{-n} sum over z, split by ones inside/outside the
        // weight-k support: wt z = i + j, dist(e, z) = (k - i) + j.
        let m = (1u64 << n) as f64;
        for k in 0..width {
            let inside = &self.pascal[k];
            let outside = &self.pascal[n - k];
            let mut acc = 0.0;
            for i in 0..=k {
                for j in 0..=(n - k) {
                    let count = (inside[i] * outside[j]) as f64;
                    acc += count * self.overlaps[(i + j) * width + (k - i + j)].re;
                }
            }
            self.gamma[k] = acc / m;
        }
        // Walsh spectrum by weight class.
        for wt in 0..width {
            let mut acc = 0.0;
            for k in 0..width {
                acc += self.gamma[k] * self.kraw[k][wt] as f64;
            }
            self.lambda[wt] = acc.max(0.0);
        }
        let lambda_max = self.lambda.iter().cloned().fold(0.0, f64::max);
        // Same zero floor as the dense square root: noise on an exactly-zero
        // eigenvalue must not leak through the square root.
        let zero_floor = crate::srm::EIG_ZERO_REL * lambda_max;
        for l in self.lambda.iter_mut() {
            if *l <= zero_floor {
                *l = 0.0;
            }
        }

        let binom = &self.pascal[n];
        let mut rank = 0usize;
        let mut diag_sum = 0.0;
        for wt in 0..width {
            if self.lambda[wt] > EIG_RANK_REL_TOL * lambda_max {
                rank += binom[wt] as usize;
            }
            diag_sum += binom[wt] as f64 * self.lambda[wt].sqrt();
        }
        let srm_probability = (diag_sum / m) * (diag_sum / m);
        let states = 1usize << n;
        let rank_deficient = rank < states;
        let objective = if rank_deficient {
            srm_probability.min(rank as f64 / states as f64)
        } else {
            srm_probability
        };
        EvalOutcome {
            srm_probability,
            rank,
            rank_deficient,
            objective,
        }
    }
}

fn krawtchouk_table(n: usize, pascal: &[Vec<u64>]) -> Vec<Vec<i64>> {
    let mut kraw = vec![vec![0i64; n + 1]; n + 1];
    for k in 0..=n {
        for m in 0..=n {
            let mut acc = 0i64;
            for i in 0..=k.min(m) {
                if k - i <= n - m {
                    let term = (pascal[m][i] * pascal[n - m][k - i]) as i64;
                    acc += if i % 2 == 0 { term } else { -term };
                }
            }
            kraw[k][m] = acc;
        }
    }
    kraw
}

/// The sweep objective at a given response state: the square-root-measurement
/// success probability of the ensemble, capped by the rank bound when the
/// ensemble is rank-deficient.
pub fn objective(n: usize, sigma: &SigmaAssignment, psi: &ResponseState) -> Result<f64> {
    let mut eval = AssignmentEvaluator::new(n, sigma)?;
    Ok(eval.evaluate_response(psi)?.objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{parse_cycles, Permutation};
    use crate::srm::{build_state_matrix, discriminate};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_psi(r: usize, rng: &mut ChaCha8Rng) -> ResponseState {
        ResponseState::normalized(
            (0..r)
                .map(|_| {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn matches_dense_route_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..120 {
            let n = rng.random_range(1..=4usize);
            let r = rng.random_range(1..=4usize);
            let total = SigmaAssignment::total(n, r).unwrap();
            let idx = (rng.random_range(0..u64::MAX) as u128 % total) as u64;
            let sigma = SigmaAssignment::from_index(idx, n, r).unwrap();
            let psi = random_psi(r, &mut rng);

            let mut eval = AssignmentEvaluator::new(n, &sigma).unwrap();
            let fast = eval.evaluate_response(&psi).unwrap();

            let b = build_state_matrix(n, &sigma, &psi).unwrap();
            let dense = discriminate(&b).unwrap();

            assert!(
                (fast.srm_probability - dense.probability).abs() < 1e-10,
                "trial {trial}: fast {} vs dense {}",
                fast.srm_probability,
                dense.probability
            );
            assert_eq!(fast.rank, dense.rank, "trial {trial} (n={n}, r={r}, idx={idx})");
            assert_eq!(fast.rank_deficient, dense.rank_deficient);
        }
    }

    #[test]
    fn all_identity_assignment_scores_inverse_m() {
        for n in 1..=4 {
            let sigma = SigmaAssignment::from_index(0, n, 3).unwrap();
            let psi = ResponseState::basis(3, 2).unwrap();
            let p = objective(n, &sigma, &psi).unwrap();
            assert_abs_diff_eq!(p, 1.0 / (1u64 << n) as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn b1_assignment_with_minus_scores_one() {
        for n in [2usize, 4, 6] {
            let sigma = SigmaAssignment::b1_assignment(n).unwrap();
            let p = objective(n, &sigma, &ResponseState::minus()).unwrap();
            assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_swap_at_distance_one_scores_four_fifths() {
        // For n = 3, r = 2 with only sigma_1 = (12) the objective reduces to
        // f(l) = ((sqrt(17 + 15 l) + 9 sqrt(1 - l)) / 16)^2 in
        // l = <X psi, psi>, maximized at l = -4/5 with value exactly 4/5.
        // Real psi = (cos t, -sin t) has l = -sin(2t).
        let sigma = SigmaAssignment::new(vec![
            Permutation::identity(2).unwrap(),
            parse_cycles("(12)", 2).unwrap(),
            Permutation::identity(2).unwrap(),
            Permutation::identity(2).unwrap(),
        ])
        .unwrap();
        let t = 0.5 * (4.0f64 / 5.0).asin();
        let psi = ResponseState::new(vec![
            Complex64::new(t.cos(), 0.0),
            Complex64::new(-t.sin(), 0.0),
        ])
        .unwrap();
        let p = objective(3, &sigma, &psi).unwrap();
        assert_abs_diff_eq!(p, 0.8, epsilon = 1e-12);

        // And the closed form holds away from the optimum too.
        let t2 = 0.3f64;
        let psi2 = ResponseState::new(vec![
            Complex64::new(t2.cos(), 0.0),
            Complex64::new(-t2.sin(), 0.0),
        ])
        .unwrap();
        let l = -(2.0 * t2).sin();
        let expect = ((17.0 + 15.0 * l).sqrt() + 9.0 * (1.0 - l).sqrt()).powi(2) / 256.0;
        assert_abs_diff_eq!(objective(3, &sigma, &psi2).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn gauge_motion_is_exactly_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = 3;
            let r = 3;
            let total = SigmaAssignment::total(n, r).unwrap() as u64;
            let sigma = SigmaAssignment::from_index(rng.random_range(0..total), n, r).unwrap();
            let pi = Permutation::from_lex_rank(rng.random_range(0..6), r).unwrap();
            let psi = random_psi(r, &mut rng);
            let p0 = objective(n, &sigma, &psi).unwrap();
            let p1 = objective(
                n,
                &sigma.right_compose(&pi).unwrap(),
                &psi.permuted(&pi.inverse()).unwrap(),
            )
            .unwrap();
            assert_eq!(p0.to_bits(), p1.to_bits(), "gauge motion must be bitwise exact");
        }
    }

    #[test]
    fn coords_normalization_and_degenerate_input() {
        let sigma = SigmaAssignment::b1_assignment(2).unwrap();
        let mut eval = AssignmentEvaluator::new(2, &sigma).unwrap();
        // minus state, scaled arbitrarily: same objective.
        let scaled = eval.evaluate_coords(&[5.0, 0.0, -5.0, 0.0]).unwrap();
        assert_abs_diff_eq!(scaled.objective, 1.0, epsilon = 1e-12);
        assert!(eval.evaluate_coords(&[0.0, 0.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn rejects_mismatched_shapes() {
        let sigma = SigmaAssignment::b1_assignment(2).unwrap();
        assert!(AssignmentEvaluator::new(3, &sigma).is_err());
        let mut eval = AssignmentEvaluator::new(2, &sigma).unwrap();
        assert!(eval
            .evaluate_response(&ResponseState::basis(3, 1).unwrap())
            .is_err());
    }
}
