//! State-ensemble construction and square-root-measurement success
//! probability, with rank analysis and an independent two-state closed form.
//!
//! The ensemble for a hidden-string oracle is the matrix B whose column a is
//! the oracle output O_sigma(a) |eta^0> (x) psi. The measurement succeeds on
//! state c with probability |(sqrt(G))_cc|^2 where G = B^dagger B; records
//! carry the uniform average over c.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::domain::{BitString, SigmaAssignment};
use crate::error::{Error, Result};
use crate::statevec::{ResponseState, StateVector};

/// Hermitian deviation allowed in a Gram matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-diagonal tolerance for Gram matrices of normalized ensembles.
pub const DIAG_TOL: f64 = 1e-9;
/// Eigenvalues of a PSD matrix may undershoot zero by at most this much.
pub const PSD_EIG_TOL: f64 = 1e-9;
/// Relative singular value threshold for numerical rank.
pub const RANK_REL_TOL: f64 = 1e-8;
/// Eigenvalues below this fraction of the largest are rounding noise on a
/// mathematically zero eigenvalue and are treated as exact zeros. Without
/// this the square root turns O(1e-16) noise into O(1e-8) diagonal error.
pub const EIG_ZERO_REL: f64 = 1e-12;

/// The Nr x M ensemble matrix, with provenance metadata.
#[derive(Clone, Debug)]
pub struct StateMatrix {
    matrix: DMatrix<Complex64>,
    n: usize,
    r: usize,
    sigma: SigmaAssignment,
    psi: ResponseState,
}

impl StateMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn sigma(&self) -> &SigmaAssignment {
        &self.sigma
    }

    pub fn psi(&self) -> &ResponseState {
        &self.psi
    }

    /// Number of ensemble states (columns).
    pub fn states(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn column(&self, a: usize) -> DVector<Complex64> {
        self.matrix.column(a).into_owned()
    }
}

/// Builds the ensemble: column a is the oracle output for hidden string a.
pub fn build_state_matrix(
    n: usize,
    sigma: &SigmaAssignment,
    psi: &ResponseState,
) -> Result<StateMatrix> {
    if sigma.n() != n {
        return Err(Error::ShapeMismatch(format!(
            "assignment covers distances 0..={} but n = {}",
            sigma.n(),
            n
        )));
    }
    if sigma.r() != psi.dim() {
        return Err(Error::ShapeMismatch(format!(
            "assignment degree {} vs response dimension {}",
            sigma.r(),
            psi.dim()
        )));
    }
    let r = psi.dim();
    let m = 1usize << n;
    let rows = m * r;
    let mut columns = Vec::with_capacity(m);
    for a in BitString::all(n)? {
        let mut state = StateVector::prepare_query(n, psi)?;
        state.apply_oracle(&a, sigma)?;
        columns.push(state.amplitudes().to_vec());
    }
    let matrix = DMatrix::from_fn(rows, m, |row, col| columns[col][row]);
    Ok(StateMatrix {
        matrix,
        n,
        r,
        sigma: sigma.clone(),
        psi: psi.clone(),
    })
}

/// Hermitian matrix of pairwise state overlaps, unit diagonal.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    entries: DMatrix<Complex64>,
}

impl GramMatrix {
    /// Validates Hermiticity and the unit diagonal.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "Gram matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for i in 0..entries.nrows() {
            for j in 0..entries.ncols() {
                let dev = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if dev > HERMITIAN_TOL {
                    return Err(Error::Numerical(format!(
                        "Gram matrix not Hermitian at ({i},{j}): deviation {dev:.3e}"
                    )));
                }
            }
            let d = entries[(i, i)];
            if (d.re - 1.0).abs() > DIAG_TOL || d.im.abs() > DIAG_TOL {
                return Err(Error::Numerical(format!(
                    "Gram diagonal entry {i} is {d} rather than 1"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Positive semi-definite square root.
    pub fn sqrt(&self) -> Result<DMatrix<Complex64>> {
        psd_sqrt(&self.entries)
    }

    pub fn max_deviation_from_identity(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                max = max.max((self.entries[(i, j)] - target).norm());
            }
        }
        max
    }
}

/// G = B^dagger B.
pub fn gram(b: &StateMatrix) -> Result<GramMatrix> {
    let g = b.matrix().adjoint() * b.matrix();
    GramMatrix::new(g)
}

/// Hermitian PSD square root via eigendecomposition. Eigenvalues in
/// [-PSD_EIG_TOL, 0) are clamped to zero; anything lower is a numerical
/// integrity failure.
pub fn psd_sqrt(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if m.nrows() != m.ncols() || m.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "psd_sqrt needs a square nonempty matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let herm_dev = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm_dev > HERMITIAN_TOL {
        return Err(Error::Numerical(format!(
            "psd_sqrt input not Hermitian: deviation {herm_dev:.3e}"
        )));
    }
    let eig = m.clone().symmetric_eigen();
    let largest = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let zero_floor = EIG_ZERO_REL * largest.max(0.0);
    let mut roots = DVector::zeros(eig.eigenvalues.len());
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda < -PSD_EIG_TOL {
            return Err(Error::Numerical(format!(
                "eigenvalue {lambda:.3e} below -{PSD_EIG_TOL:.0e}; matrix is not PSD"
            )));
        }
        let lambda = if lambda <= zero_floor { 0.0 } else { lambda };
        roots[k] = Complex64::new(lambda.sqrt(), 0.0);
    }
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&roots) * v.adjoint())
}

/// The square-root-measurement fragment: the diagonal of sqrt(G) and the
/// uniform-prior success probability (1/M) sum_c |(sqrt G)_cc|^2.
#[derive(Clone, Debug)]
pub struct SrmValue {
    pub probability: f64,
    pub sqrt_diag: Vec<f64>,
}

pub fn srm_probability(g: &GramMatrix) -> Result<SrmValue> {
    let s = g.sqrt()?;
    let sqrt_diag: Vec<f64> = (0..g.dim()).map(|c| s[(c, c)].re).collect();
    let m = g.dim() as f64;
    let probability = sqrt_diag.iter().map(|d| d * d).sum::<f64>() / m;
    Ok(SrmValue {
        probability,
        sqrt_diag,
    })
}

/// Optimal discrimination probability for two equiprobable pure states with
/// overlap modulus gamma: (1 + sqrt(1 - gamma^2)) / 2.
pub fn helstrom_two_state(overlap_modulus: f64) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&overlap_modulus) {
        return Err(Error::Numerical(format!(
            "overlap modulus {overlap_modulus} outside [0, 1]"
        )));
    }
    let g = overlap_modulus.min(1.0);
    Ok((1.0 + (1.0 - g * g).sqrt()) / 2.0)
}

/// Numerical rank of the ensemble and the subspace discrimination bound
/// rank / M.
pub fn rank_and_bound(b: &StateMatrix) -> (usize, f64) {
    let svd = b.matrix().clone().svd(false, false);
    let largest = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let rank = if largest == 0.0 {
        0
    } else {
        svd.singular_values
            .iter()
            .filter(|&&s| s > RANK_REL_TOL * largest)
            .count()
    };
    (rank, rank as f64 / b.states() as f64)
}

/// Rank analysis plus the square-root-measurement value for one ensemble.
#[derive(Clone, Debug)]
pub struct DiscriminationResult {
    /// Raw square-root-measurement success probability.
    pub probability: f64,
    pub rank: usize,
    /// rank / M; caps any measurement on a rank-deficient ensemble.
    pub rank_bound: f64,
    pub rank_deficient: bool,
    pub sqrt_diag: Vec<f64>,
}

pub fn discriminate(b: &StateMatrix) -> Result<DiscriminationResult> {
    let g = gram(b)?;
    let srm = srm_probability(&g)?;
    let (rank, rank_bound) = rank_and_bound(b);
    Ok(DiscriminationResult {
        probability: srm.probability,
        rank,
        rank_bound,
        rank_deficient: rank < b.states(),
        sqrt_diag: srm.sqrt_diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_psi(r: usize, rng: &mut ChaCha8Rng) -> ResponseState {
        ResponseState::normalized(
            (0..r)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn random_sigma(n: usize, r: usize, rng: &mut ChaCha8Rng) -> SigmaAssignment {
        let total = SigmaAssignment::total(n, r).unwrap() as u64;
        SigmaAssignment::from_index(rng.random_range(0..total), n, r).unwrap()
    }

    #[test]
    fn identity_assignment_gives_identical_columns() {
        let n = 3;
        let sigma = SigmaAssignment::from_index(0, n, 2).unwrap();
        let psi = ResponseState::minus();
        let b = build_state_matrix(n, &sigma, &psi).unwrap();
        assert_eq!(b.matrix().nrows(), 16);
        assert_eq!(b.matrix().ncols(), 8);
        let first = b.column(0);
        for a in 1..b.states() {
            assert_eq!(b.column(a), first);
        }
        let g = gram(&b).unwrap();
        // All-ones Gram: SRM value 1/M, rank 1, bound 1/M.
        let result = discriminate(&b).unwrap();
        assert_abs_diff_eq!(result.probability, 1.0 / 8.0, epsilon = 1e-10);
        assert_eq!(result.rank, 1);
        assert!(result.rank_deficient);
        assert_abs_diff_eq!(result.rank_bound, 1.0 / 8.0, epsilon = 1e-15);
        assert!(result.probability <= result.rank_bound + 1e-9);
        for i in 0..8 {
            for j in 0..8 {
                assert!((g.entries()[(i, j)] - Complex64::ONE).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn b1_assignment_gives_orthogonal_columns() {
        let n = 4;
        let sigma = SigmaAssignment::b1_assignment(n).unwrap();
        let psi = ResponseState::minus();
        let b = build_state_matrix(n, &sigma, &psi).unwrap();
        let g = gram(&b).unwrap();
        assert!(g.max_deviation_from_identity() < 1e-12);
        let result = discriminate(&b).unwrap();
        assert_abs_diff_eq!(result.probability, 1.0, epsilon = 1e-10);
        assert_eq!(result.rank, 16);
        assert!(!result.rank_deficient);
    }

    #[test]
    fn build_shape_checks() {
        let sigma = SigmaAssignment::additive(3, 2).unwrap();
        let psi = ResponseState::minus();
        assert!(build_state_matrix(2, &sigma, &psi).is_err());
        let psi3 = ResponseState::basis(3, 1).unwrap();
        assert!(build_state_matrix(3, &sigma, &psi3).is_err());
    }

    #[test]
    fn gram_diagonal_is_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = rng.random_range(1..=3usize);
            let r = rng.random_range(1..=4usize);
            let b =
                build_state_matrix(n, &random_sigma(n, r, &mut rng), &random_psi(r, &mut rng))
                    .unwrap();
            let g = gram(&b).unwrap();
            for i in 0..g.dim() {
                assert!((g.entries()[(i, i)].re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psd_sqrt_diagonal_examples() {
        let id = DMatrix::<Complex64>::identity(3, 3);
        let s = psd_sqrt(&id).unwrap();
        assert!((s - DMatrix::<Complex64>::identity(3, 3)).norm() < 1e-12);

        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(4.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
        ]));
        let s = psd_sqrt(&diag).unwrap();
        assert_abs_diff_eq!(s[(0, 0)].re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[(1, 1)].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[(2, 2)].re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn psd_sqrt_two_by_two_closed_form() {
        for gamma in [0.0, 0.3, 0.77, 1.0] {
            let g = DMatrix::from_row_slice(2, 2, &[
                c(1.0, 0.0),
                c(gamma, 0.0),
                c(gamma, 0.0),
                c(1.0, 0.0),
            ]);
            let s = psd_sqrt(&g).unwrap();
            let expect = ((1.0 + gamma).sqrt() + (1.0 - gamma).sqrt()) / 2.0;
            assert_abs_diff_eq!(s[(0, 0)].re, expect, epsilon = 1e-12);
            assert_abs_diff_eq!(s[(1, 1)].re, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn psd_sqrt_rejects_indefinite_and_non_hermitian() {
        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(-0.5, 0.0)]));
        assert!(psd_sqrt(&neg).is_err());
        let skew = DMatrix::from_row_slice(2, 2, &[
            c(1.0, 0.0),
            c(0.5, 0.0),
            c(0.4, 0.0),
            c(1.0, 0.0),
        ]);
        assert!(psd_sqrt(&skew).is_err());
    }

    #[test]
    fn psd_sqrt_reconstructs_random_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for &dim in &[8usize, 32, 64] {
            let a = DMatrix::from_fn(dim, dim, |_, _| {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let g = a.adjoint() * &a;
            let s = psd_sqrt(&g).unwrap();
            let rel = (&s * &s - &g).norm() / g.norm();
            assert!(rel < 1e-8, "dim {dim}: relative error {rel:.3e}");
        }
    }

    #[test]
    fn srm_probability_examples() {
        let id = GramMatrix::new(DMatrix::identity(4, 4)).unwrap();
        assert_abs_diff_eq!(srm_probability(&id).unwrap().probability, 1.0, epsilon = 1e-12);

        let ones = GramMatrix::new(DMatrix::from_element(4, 4, Complex64::ONE)).unwrap();
        assert_abs_diff_eq!(
            srm_probability(&ones).unwrap().probability,
            0.25,
            epsilon = 1e-10
        );
    }

    #[test]
    fn helstrom_examples() {
        assert_abs_diff_eq!(helstrom_two_state(0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(helstrom_two_state(1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(helstrom_two_state(0.6).unwrap(), 0.9, epsilon = 1e-15);
        assert!(helstrom_two_state(1.5).is_err());
        assert!(helstrom_two_state(-0.1).is_err());
    }

    #[test]
    fn srm_matches_helstrom_on_two_state_subensembles() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for trial in 0..200 {
            let n = rng.random_range(1..=3usize);
            let r = rng.random_range(2..=3usize);
            let b =
                build_state_matrix(n, &random_sigma(n, r, &mut rng), &random_psi(r, &mut rng))
                    .unwrap();
            let i = rng.random_range(0..b.states());
            let mut j = rng.random_range(0..b.states());
            while j == i {
                j = rng.random_range(0..b.states());
            }
            let ci = b.column(i);
            let cj = b.column(j);
            let overlap = ci.dotc(&cj);
            let sub = DMatrix::from_row_slice(2, 2, &[
                Complex64::ONE,
                overlap,
                overlap.conj(),
                Complex64::ONE,
            ]);
            let srm = srm_probability(&GramMatrix::new(sub).unwrap()).unwrap();
            let modulus = overlap.norm().min(1.0);
            if modulus > 1.0 - 1e-9 {
                // Mathematically identical states; the closed form applied
                // to the rounding-noise overlap amplifies it to sqrt scale,
                // so both routes are compared against the exact value 1/2.
                assert!((srm.probability - 0.5).abs() < 1e-9, "trial {trial}");
                assert!((helstrom_two_state(modulus).unwrap() - 0.5).abs() < 1e-4);
                continue;
            }
            let hel = helstrom_two_state(modulus).unwrap();
            assert!(
                (srm.probability - hel).abs() < 1e-9,
                "trial {trial}: srm {} vs helstrom {}",
                srm.probability,
                hel
            );
        }
    }

    #[test]
    fn rank_examples() {
        let n = 3;
        let psi = ResponseState::minus();
        let orth = build_state_matrix(4, &SigmaAssignment::b1_assignment(4).unwrap(), &psi)
            .unwrap();
        let (rank, bound) = rank_and_bound(&orth);
        assert_eq!(rank, 16);
        assert_abs_diff_eq!(bound, 1.0, epsilon = 1e-15);

        let flat = build_state_matrix(n, &SigmaAssignment::from_index(0, n, 2).unwrap(), &psi)
            .unwrap();
        let (rank, bound) = rank_and_bound(&flat);
        assert_eq!(rank, 1);
        assert_abs_diff_eq!(bound, 0.125, epsilon = 1e-15);
    }

    #[test]
    fn probability_unit_range_and_identity_criterion() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..60 {
            let n = rng.random_range(1..=4usize);
            let r = rng.random_range(1..=4usize);
            let b =
                build_state_matrix(n, &random_sigma(n, r, &mut rng), &random_psi(r, &mut rng))
                    .unwrap();
            let g = gram(&b).unwrap();
            let srm = srm_probability(&g).unwrap();
            assert!(srm.probability >= 0.0 && srm.probability <= 1.0 + 1e-12);
            let near_identity = g.max_deviation_from_identity() <= 1e-8;
            let near_one = srm.probability >= 1.0 - 1e-9;
            assert_eq!(near_identity, near_one);
        }
    }

    #[test]
    fn gauge_motion_preserves_state_matrix_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..20 {
            let n = 3;
            let r = 3;
            let sigma = random_sigma(n, r, &mut rng);
            let psi = random_psi(r, &mut rng);
            let pi = crate::domain::Permutation::from_lex_rank(rng.random_range(0..6), r)
                .unwrap();
            let b0 = build_state_matrix(n, &sigma, &psi).unwrap();
            let b1 = build_state_matrix(
                n,
                &sigma.right_compose(&pi).unwrap(),
                &psi.permuted(&pi.inverse()).unwrap(),
            )
            .unwrap();
            assert_eq!(b0.matrix(), b1.matrix());
        }
    }
}
