//! Binary functions of the Hamming distance and the concept classes they
//! induce.
//!
//! An `HFunction` is a map h : {0,..,n} -> {0,1}. Composing it with the
//! distance to a hidden string a gives the concept g_a(x) = h(dist(a,x)).

use std::fmt;

use crate::domain::bitstring::{b1, BitString, MAX_N};
use crate::error::{Error, Result};

/// Widths above this make the exhaustive 2^n x 2^n concept table too large.
pub const MAX_EXHAUSTIVE_N: usize = 12;

/// h : {0,..,n} -> {0,1}, stored with h(d) at bit d.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct HFunction {
    bits: u32,
    n: u8,
}

impl HFunction {
    /// Builds from the value sequence h(0), .., h(n).
    pub fn new(values: &[u8]) -> Result<Self> {
        if values.is_empty() || values.len() > MAX_N + 1 {
            return Err(Error::InvalidHFunction(format!(
                "need between 1 and {} values, got {}",
                MAX_N + 1,
                values.len()
            )));
        }
        let mut bits = 0u32;
        for (d, &v) in values.iter().enumerate() {
            match v {
                0 => {}
                1 => bits |= 1 << d,
                _ => {
                    return Err(Error::InvalidHFunction(format!(
                        "value {v} at position {d} is not a bit"
                    )))
                }
            }
        }
        Ok(Self {
            bits,
            n: (values.len() - 1) as u8,
        })
    }

    /// The h whose value table is the binary digits of `index`
    /// (bit d of `index` is h(d)); inverse of [`Self::index`].
    pub fn from_index(index: u32, n: usize) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::WidthOutOfRange(n, MAX_N));
        }
        if index >> (n + 1) != 0 {
            return Err(Error::InvalidHFunction(format!(
                "index {index} does not fit {} bits",
                n + 1
            )));
        }
        Ok(Self { bits: index, n: n as u8 })
    }

    /// The second-least-significant-bit function restricted to {0,..,n}.
    pub fn b1(n: usize) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::WidthOutOfRange(n, MAX_N));
        }
        let mut bits = 0u32;
        for d in 0..=n as u32 {
            bits |= (b1(d) as u32) << d;
        }
        Ok(Self { bits, n: n as u8 })
    }

    pub fn constant(value: u8, n: usize) -> Result<Self> {
        let values = vec![value; n + 1];
        Self::new(&values)
    }

    /// Query width n; the table has n + 1 entries.
    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn len(&self) -> usize {
        self.n as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, d: usize) -> u8 {
        assert!(d <= self.n(), "distance {d} out of range 0..={}", self.n());
        ((self.bits >> d) & 1) as u8
    }

    pub fn index(&self) -> u32 {
        self.bits
    }

    pub fn values(&self) -> Vec<u8> {
        (0..self.len()).map(|d| self.value(d)).collect()
    }
}

impl fmt::Display for HFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in 0..self.len() {
            write!(f, "{}", self.value(d))?;
        }
        Ok(())
    }
}

impl fmt::Debug for HFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HFunction({self})")
    }
}

/// g_a(x) = h(dist(a, x)).
pub fn concept_value(h: &HFunction, a: &BitString, x: &BitString) -> Result<u8> {
    if a.n() != x.n() {
        return Err(Error::LengthMismatch(a.n(), x.n()));
    }
    if h.n() != a.n() {
        return Err(Error::LengthMismatch(h.len(), a.n() + 1));
    }
    let d = crate::domain::bitstring::hamming_distance(a, x)?;
    Ok(h.value(d as usize))
}

/// Number of distinct concepts g_a over a in Z_2^n, by exhaustive
/// construction of the 2^n x 2^n value table.
pub fn distinct_concepts(h: &HFunction) -> Result<usize> {
    let n = h.n();
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::SizeLimit(format!(
            "distinct_concepts needs n <= {MAX_EXHAUSTIVE_N}, got {n}"
        )));
    }
    let size = 1usize << n;
    let words = size.div_ceil(64);
    let mut rows = std::collections::HashSet::with_capacity(size);
    for a in 0..size {
        let mut row = vec![0u64; words];
        for x in 0..size {
            let d = (a ^ x).count_ones() as usize;
            if h.value(d) == 1 {
                row[x / 64] |= 1 << (x % 64);
            }
        }
        rows.insert(row);
    }
    Ok(rows.len())
}

/// Same count through the weight-class symmetry: rows for a and a' coincide
/// exactly when e = a xor a' satisfies h(wt z) = h(wt(z xor e)) for all z,
/// a condition that depends only on wt(e). The equal-row classes therefore
/// form a subgroup made of whole weight classes, and the concept count is
/// 2^n divided by its order. Agrees with [`distinct_concepts`] (tested
/// exhaustively) but runs in O(n^3).
pub fn distinct_concepts_fast(h: &HFunction) -> usize {
    let n = h.n();
    let binom = binomial_row(n);
    let mut stabilizer = 0u64;
    for k in 0..=n {
        if weight_class_fixes_h(h, k) {
            stabilizer += binom[k];
        }
    }
    ((1u64 << n) / stabilizer) as usize
}

/// Does every e of weight k satisfy row_e = row_0, i.e. h(w) = h(d) for all
/// weight pairs (w, d) realizable as (wt z, dist(e, z))?
fn weight_class_fixes_h(h: &HFunction, k: usize) -> bool {
    let n = h.n();
    // z splits into i ones inside the support of e and j ones outside:
    // wt z = i + j, dist(e, z) = (k - i) + j.
    for i in 0..=k {
        for j in 0..=(n - k) {
            if h.value(i + j) != h.value(k - i + j) {
                return false;
            }
        }
    }
    true
}

pub(crate) fn binomial_row(n: usize) -> Vec<u64> {
    let mut row = vec![1u64; n + 1];
    for k in 1..=n {
        row[k] = row[k - 1] * (n - k + 1) as u64 / k as u64;
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_lookup() {
        let h = HFunction::new(&[0, 1, 1, 0]).unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.len(), 4);
        assert_eq!(h.values(), vec![0, 1, 1, 0]);
        assert_eq!(h.to_string(), "0110");
        assert!(HFunction::new(&[]).is_err());
        assert!(HFunction::new(&[0, 2]).is_err());
    }

    #[test]
    fn b1_table_matches_definition() {
        let h = HFunction::b1(7).unwrap();
        assert_eq!(h.values(), vec![0, 0, 1, 1, 0, 0, 1, 1]);
    }

    #[test]
    fn index_roundtrip() {
        for n in 1..=4 {
            for idx in 0..(1u32 << (n + 1)) {
                let h = HFunction::from_index(idx, n).unwrap();
                assert_eq!(h.index(), idx);
                assert_eq!(h.n(), n);
            }
        }
        assert!(HFunction::from_index(8, 2).is_err());
    }

    #[test]
    fn concept_value_examples() {
        let h = HFunction::b1(3).unwrap();
        let a: BitString = "011".parse().unwrap();
        let x: BitString = "000".parse().unwrap();
        assert_eq!(concept_value(&h, &a, &x).unwrap(), 1);
        assert_eq!(concept_value(&h, &a, &a).unwrap(), h.value(0));

        let zero = HFunction::constant(0, 3).unwrap();
        for a in BitString::all(3).unwrap() {
            for x in BitString::all(3).unwrap() {
                assert_eq!(concept_value(&zero, &a, &x).unwrap(), 0);
            }
        }

        let short: BitString = "01".parse().unwrap();
        assert!(concept_value(&h, &a, &short).is_err());
        assert!(concept_value(&h, &short, &short).is_err());
    }

    #[test]
    fn concept_counts_lemma_3_1() {
        // 2^{n-1} concepts when n = 1 mod 4, 2^n otherwise.
        for n in 2..=9 {
            let h = HFunction::b1(n).unwrap();
            let expect = if n % 4 == 1 { 1 << (n - 1) } else { 1 << n };
            assert_eq!(distinct_concepts(&h).unwrap(), expect, "n = {n}");
        }
    }

    #[test]
    fn concept_count_examples() {
        assert_eq!(distinct_concepts(&HFunction::b1(5).unwrap()).unwrap(), 16);
        assert_eq!(distinct_concepts(&HFunction::b1(4).unwrap()).unwrap(), 16);
        assert_eq!(
            distinct_concepts(&HFunction::constant(1, 6).unwrap()).unwrap(),
            1
        );
        assert!(distinct_concepts(&HFunction::b1(13).unwrap()).is_err());
    }

    #[test]
    fn fast_count_matches_exhaustive() {
        for n in 1..=6 {
            for idx in 0..(1u32 << (n + 1)) {
                let h = HFunction::from_index(idx, n).unwrap();
                assert_eq!(
                    distinct_concepts_fast(&h),
                    distinct_concepts(&h).unwrap(),
                    "n = {n}, h = {h}"
                );
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_row(5), vec![1, 5, 10, 10, 5, 1]);
    }
}
