//! Maps from Hamming distances to permutations of the response set, and the
//! mixed-radix enumeration that makes the assignment space indexable.

use crate::domain::bitstring::b1;
use crate::domain::perm::{factorials, format_cycles, Permutation};
use crate::error::{Error, Result};

/// sigma : {0,..,n} -> S_r; `perms[d]` acts when the oracle sees distance d.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SigmaAssignment {
    perms: Vec<Permutation>,
    r: usize,
}

impl SigmaAssignment {
    pub fn new(perms: Vec<Permutation>) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::InvalidPermutation(
                "assignment needs at least sigma_0".into(),
            ));
        }
        let r = perms[0].degree();
        for p in &perms {
            if p.degree() != r {
                return Err(Error::DegreeMismatch(r, p.degree()));
            }
        }
        Ok(Self { perms, r })
    }

    /// n such that distances 0..=n are covered.
    pub fn n(&self) -> usize {
        self.perms.len() - 1
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn perm(&self, d: usize) -> &Permutation {
        &self.perms[d]
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn sigma0_is_identity(&self) -> bool {
        self.perms[0].is_identity()
    }

    /// The additive oracle action d -> (12..r)^d.
    pub fn additive(n: usize, r: usize) -> Result<Self> {
        let full_cycle = if r == 1 {
            Permutation::identity(1)?
        } else {
            let images: Vec<usize> = (1..=r).map(|b| b % r + 1).collect();
            Permutation::from_one_line(&images)?
        };
        let perms = (0..=n as u32).map(|d| full_cycle.power(d)).collect();
        Self::new(perms)
    }

    /// The degree-2 action d -> (12)^{b1(d)} behind Algorithm A.
    pub fn b1_assignment(n: usize) -> Result<Self> {
        let swap = Permutation::from_one_line(&[2, 1])?;
        let perms = (0..=n as u32).map(|d| swap.power(b1(d) as u32)).collect();
        Self::new(perms)
    }

    /// Pointwise right composition sigma_d -> sigma_d * pi (pi applied
    /// first); the gauge motion that pairs with psi -> pi^{-1} psi.
    pub fn right_compose(&self, pi: &Permutation) -> Result<Self> {
        let perms = self
            .perms
            .iter()
            .map(|p| p.compose(pi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(perms)
    }

    /// Entrywise inverse assignment.
    pub fn inverse(&self) -> Self {
        Self {
            perms: self.perms.iter().map(|p| p.inverse()).collect(),
            r: self.r,
        }
    }

    /// Total number of assignments (r!)^{n+1}.
    pub fn total(n: usize, r: usize) -> Result<u128> {
        let fact = *factorials(r).last().expect("nonempty") as u128;
        let mut total: u128 = 1;
        for _ in 0..=n {
            total = total.checked_mul(fact).ok_or_else(|| {
                Error::SizeLimit(format!("(r!)^(n+1) overflows for n={n}, r={r}"))
            })?;
        }
        Ok(total)
    }

    /// Decodes a mixed-radix index, base r!, with the digit for sigma_0 most
    /// significant. Index 0 is the all-identity assignment and the
    /// gauge-reduced slice {sigma_0 = id} is exactly [0, (r!)^n).
    pub fn from_index(index: u64, n: usize, r: usize) -> Result<Self> {
        let total = Self::total(n, r)?;
        if (index as u128) >= total {
            return Err(Error::AssignmentIndexOutOfRange { index, total });
        }
        let fact = *factorials(r).last().expect("nonempty");
        let mut digits = vec![0u64; n + 1];
        let mut rest = index;
        for d in (0..=n).rev() {
            digits[d] = rest % fact;
            rest /= fact;
        }
        let perms = digits
            .into_iter()
            .map(|rank| Permutation::from_lex_rank(rank, r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(perms)
    }

    /// Inverse of [`Self::from_index`].
    pub fn index(&self) -> u64 {
        let fact = *factorials(self.r).last().expect("nonempty");
        let mut index = 0u64;
        for p in &self.perms {
            index = index * fact + p.lex_rank();
        }
        index
    }

    pub fn cycle_texts(&self) -> Vec<String> {
        self.perms.iter().map(format_cycles).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::perm::parse_cycles;

    #[test]
    fn additive_parity_action() {
        let sigma = SigmaAssignment::additive(3, 2).unwrap();
        assert_eq!(sigma.cycle_texts(), vec!["(1)", "(12)", "(1)", "(12)"]);
    }

    #[test]
    fn additive_cycle_powers() {
        let sigma = SigmaAssignment::additive(2, 4).unwrap();
        let four_cycle = parse_cycles("(1234)", 4).unwrap();
        assert_eq!(sigma.perm(0), &Permutation::identity(4).unwrap());
        assert_eq!(sigma.perm(1), &four_cycle);
        assert_eq!(sigma.perm(2), &four_cycle.power(2));
        assert_eq!(sigma.cycle_texts()[2], "(13)(24)");
    }

    #[test]
    fn b1_assignment_table() {
        let sigma = SigmaAssignment::b1_assignment(3).unwrap();
        assert_eq!(sigma.cycle_texts(), vec!["(1)", "(1)", "(12)", "(12)"]);
    }

    #[test]
    fn index_zero_is_all_identity() {
        let sigma = SigmaAssignment::from_index(0, 3, 3).unwrap();
        assert!(sigma.perms().iter().all(|p| p.is_identity()));
    }

    #[test]
    fn last_index_is_all_lex_last() {
        let total = SigmaAssignment::total(2, 3).unwrap() as u64;
        let sigma = SigmaAssignment::from_index(total - 1, 2, 3).unwrap();
        let last = Permutation::from_lex_rank(5, 3).unwrap();
        assert!(sigma.perms().iter().all(|p| *p == last));
        assert!(SigmaAssignment::from_index(total, 2, 3).is_err());
    }

    #[test]
    fn index_roundtrip_spot() {
        for k in [0u64, 1, 17] {
            let sigma = SigmaAssignment::from_index(k, 3, 3).unwrap();
            assert_eq!(sigma.index(), k);
        }
    }

    #[test]
    fn gauge_reduced_slice_is_a_prefix() {
        let n = 2;
        let r = 3;
        let reduced = 36u64; // (r!)^n
        for idx in 0..SigmaAssignment::total(n, r).unwrap() as u64 {
            let sigma = SigmaAssignment::from_index(idx, n, r).unwrap();
            assert_eq!(sigma.sigma0_is_identity(), idx < reduced, "idx {idx}");
        }
    }

    #[test]
    fn totals() {
        assert_eq!(SigmaAssignment::total(3, 2).unwrap(), 16);
        assert_eq!(SigmaAssignment::total(3, 3).unwrap(), 1296);
        assert_eq!(SigmaAssignment::total(5, 3).unwrap(), 46656);
    }

    #[test]
    fn right_compose_hits_every_perm() {
        let sigma = SigmaAssignment::from_index(123, 2, 3).unwrap();
        let pi = parse_cycles("(123)", 3).unwrap();
        let moved = sigma.right_compose(&pi).unwrap();
        for d in 0..=2 {
            assert_eq!(moved.perm(d), &sigma.perm(d).compose(&pi).unwrap());
        }
    }

    #[test]
    fn inverse_is_pointwise() {
        let sigma = SigmaAssignment::from_index(777, 3, 3).unwrap();
        let inv = sigma.inverse();
        for d in 0..=3 {
            assert!(sigma.perm(d).compose(inv.perm(d)).unwrap().is_identity());
        }
    }
}
