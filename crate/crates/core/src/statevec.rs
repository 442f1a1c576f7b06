//! Exact complex statevector simulation on the query (x) response space
//! (C^2)^(x n) (x) C^r.
//!
//! Basis layout: index = x * r + (b - 1) for x in 0..2^n and response label
//! b in 1..=r, so an oracle application touches r contiguous amplitudes per
//! query value. Only the transforms the learning pipeline needs are exposed.

use num_complex::Complex64;

use crate::domain::{BitString, SigmaAssignment, MAX_N};
use crate::error::{Error, Result};

/// Construction-time normalization tolerance.
pub const UNIT_TOL: f64 = 1e-9;
/// Post-operation norm drift bound; operations assert it.
pub const NORM_DRIFT_TOL: f64 = 1e-12;

/// A unit vector in C^r initializing the response register.
#[derive(Clone, PartialEq, Debug)]
pub struct ResponseState {
    entries: Vec<Complex64>,
}

impl ResponseState {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ShapeMismatch("response state needs r >= 1".into()));
        }
        let norm = l2_norm(&entries);
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitState(norm));
        }
        Ok(Self { entries })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(mut entries: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&entries);
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::NonUnitState(norm));
        }
        for e in &mut entries {
            *e /= norm;
        }
        Ok(Self { entries })
    }

    /// Basis state |b> with 1-based label.
    pub fn basis(r: usize, b: usize) -> Result<Self> {
        if b < 1 || b > r {
            return Err(Error::ShapeMismatch(format!("label {b} outside 1..={r}")));
        }
        let mut entries = vec![Complex64::ZERO; r];
        entries[b - 1] = Complex64::ONE;
        Self::new(entries)
    }

    /// (|1> - |2>)/sqrt(2); the r = 2 phase-kickback state.
    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            entries: vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Coordinates shuffled by the permutation matrix of p: out[p(b)] = in[b].
    pub fn permuted(&self, p: &crate::domain::Permutation) -> Result<Self> {
        if p.degree() != self.dim() {
            return Err(Error::DegreeMismatch(p.degree(), self.dim()));
        }
        let mut entries = vec![Complex64::ZERO; self.dim()];
        for b in 0..self.dim() {
            entries[p.image(b)] = self.entries[b];
        }
        Ok(Self { entries })
    }

    /// |<self, other>|.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DegreeMismatch(self.dim(), other.dim()));
        }
        let ip: Complex64 = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(ip.norm())
    }
}

/// A normalized state on the query (x) response space.
#[derive(Clone, PartialEq, Debug)]
pub struct StateVector {
    amps: Vec<Complex64>,
    n: usize,
    r: usize,
}

impl StateVector {
    /// The equal superposition query |eta^0> (x) psi: amplitude 2^{-n/2}
    /// psi_b at every (x, b).
    pub fn prepare_query(n: usize, psi: &ResponseState) -> Result<Self> {
        if n < 1 || n > MAX_N {
            return Err(Error::WidthOutOfRange(n, MAX_N));
        }
        let r = psi.dim();
        let scale = 0.5f64.powi(n as i32 / 2)
            * if n % 2 == 1 {
                std::f64::consts::FRAC_1_SQRT_2
            } else {
                1.0
            };
        let mut amps = Vec::with_capacity((1usize << n) * r);
        for _x in 0..(1usize << n) {
            for b in 0..r {
                amps.push(psi.entries()[b] * scale);
            }
        }
        let state = Self { amps, n, r };
        state.assert_normalized();
        Ok(state)
    }

    /// Basis state |x> (x) psi.
    pub fn basis_query(x: &BitString, psi: &ResponseState) -> Result<Self> {
        let n = x.n();
        let r = psi.dim();
        let mut amps = vec![Complex64::ZERO; (1usize << n) * r];
        for b in 0..r {
            amps[x.value() * r + b] = psi.entries()[b];
        }
        let state = Self { amps, n, r };
        state.assert_normalized();
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, x: usize, b: usize) -> Complex64 {
        self.amps[x * self.r + b]
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// H^(x n) on the query register via the fast Walsh-Hadamard transform;
    /// involutive.
    pub fn apply_walsh_hadamard(&mut self) {
        let r = self.r;
        let size = 1usize << self.n;
        for bit in 0..self.n {
            let stride = (1usize << bit) * r;
            let block = stride * 2;
            let mut base = 0;
            while base < size * r {
                for off in 0..stride {
                    let i = base + off;
                    let j = i + stride;
                    let (u, v) = (self.amps[i], self.amps[j]);
                    self.amps[i] = u + v;
                    self.amps[j] = u - v;
                }
                base += block;
            }
        }
        let scale = 0.5f64.powi(self.n as i32 / 2)
            * if self.n % 2 == 1 {
                std::f64::consts::FRAC_1_SQRT_2
            } else {
                1.0
            };
        for a in &mut self.amps {
            *a *= scale;
        }
        self.assert_normalized();
    }

    /// Diagonal phase D |x> = (-1)^{b1(wt x)} |x> on the query register.
    pub fn apply_phase_d(&mut self) {
        for x in 0..(1usize << self.n) {
            if crate::domain::b1(x.count_ones()) == 1 {
                for b in 0..self.r {
                    self.amps[x * self.r + b] = -self.amps[x * self.r + b];
                }
            }
        }
        self.assert_normalized();
    }

    /// Basis permutation P |x> = |hat(x)>; defined only for even n, where
    /// the hat map is a bijection.
    pub fn apply_hat_p(&mut self) -> Result<()> {
        if self.n % 2 != 0 {
            return Err(Error::OddWidth("apply_hat_p", self.n));
        }
        let r = self.r;
        let full = (1usize << self.n) - 1;
        // hat is an involution for even n: swap x with its odd-weight mate.
        for x in 0..(1usize << self.n) {
            if x.count_ones() % 2 == 1 {
                let hx = x ^ full;
                if x < hx {
                    for b in 0..r {
                        self.amps.swap(x * r + b, hx * r + b);
                    }
                }
            }
        }
        self.assert_normalized();
        Ok(())
    }

    /// The permutation-model oracle of the hidden string a: for each x the
    /// r response amplitudes move by sigma_{dist(a,x)}.
    pub fn apply_oracle(&mut self, a: &BitString, sigma: &SigmaAssignment) -> Result<()> {
        if a.n() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "hidden string width {} vs state width {}",
                a.n(),
                self.n
            )));
        }
        if sigma.n() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "assignment covers distances 0..={} but n = {}",
                sigma.n(),
                self.n
            )));
        }
        if sigma.r() != self.r {
            return Err(Error::ShapeMismatch(format!(
                "assignment degree {} vs response dimension {}",
                sigma.r(),
                self.r
            )));
        }
        let r = self.r;
        let a_val = a.value();
        let mut scratch = vec![Complex64::ZERO; r];
        for x in 0..(1usize << self.n) {
            let d = crate::domain::dist_packed(x, a_val) as usize;
            let p = sigma.perm(d);
            if p.is_identity() {
                continue;
            }
            let base = x * r;
            scratch.copy_from_slice(&self.amps[base..base + r]);
            for b in 0..r {
                self.amps[base + p.image(b)] = scratch[b];
            }
        }
        self.assert_normalized();
        Ok(())
    }

    /// Probability distribution of measuring the query register.
    pub fn query_marginal(&self) -> Vec<f64> {
        let mut probs = vec![0.0; 1usize << self.n];
        for x in 0..probs.len() {
            probs[x] = self.amps[x * self.r..(x + 1) * self.r]
                .iter()
                .map(|a| a.norm_sqr())
                .sum();
        }
        probs
    }

    fn assert_normalized(&self) {
        let norm = self.norm();
        assert!(
            (norm - 1.0).abs() <= NORM_DRIFT_TOL,
            "statevector norm drifted to {norm}"
        );
    }
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}
