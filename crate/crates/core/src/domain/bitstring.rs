//! Bit strings over Z_2^n and the maps built on them.
//!
//! Serialization convention: bit 0 is the leftmost character of the ASCII
//! form, i.e. the most significant binary digit of the packed value. All
//! distance and weight computations are independent of this choice; it only
//! matters when strings cross the text boundary.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported query width. 2^n * r amplitudes must stay comfortably
/// in memory for exact simulation.
pub const MAX_N: usize = 20;

/// An n-bit string, 1 <= n <= 20.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: u32,
    n: u8,
}

impl BitString {
    /// Builds a bit string from its packed integer value.
    pub fn new(value: usize, n: usize) -> Result<Self> {
        if n < 1 || n > MAX_N {
            return Err(Error::WidthOutOfRange(n, MAX_N));
        }
        if value >> n != 0 {
            return Err(Error::InvalidBitString(format!(
                "value {value} does not fit in {n} bits"
            )));
        }
        Ok(Self {
            value: value as u32,
            n: n as u8,
        })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    /// All 2^n strings of width n, in increasing order of packed value.
    pub fn all(n: usize) -> Result<impl Iterator<Item = BitString>> {
        if n < 1 || n > MAX_N {
            return Err(Error::WidthOutOfRange(n, MAX_N));
        }
        Ok((0..(1usize << n)).map(move |v| BitString {
            value: v as u32,
            n: n as u8,
        }))
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Packed value; doubles as the query-register basis index.
    pub fn value(&self) -> usize {
        self.value as usize
    }

    /// Bit i, with bit 0 the leftmost serialized character.
    pub fn bit(&self, i: usize) -> u8 {
        assert!(i < self.n());
        ((self.value >> (self.n() - 1 - i)) & 1) as u8
    }

    pub fn weight(&self) -> u32 {
        self.value.count_ones()
    }

    pub fn complement(&self) -> Self {
        Self {
            value: self.value ^ mask(self.n()),
            n: self.n,
        }
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch(self.n(), other.n()));
        }
        Ok(Self {
            value: self.value ^ other.value,
            n: self.n,
        })
    }

    /// Inner product a . x modulo 2.
    pub fn dot(&self, other: &Self) -> Result<u8> {
        if self.n != other.n {
            return Err(Error::LengthMismatch(self.n(), other.n()));
        }
        Ok(((self.value & other.value).count_ones() & 1) as u8)
    }

    /// The hat map: x itself when wt(x) is even, the complement otherwise.
    /// A bijection on Z_2^n exactly when n is even.
    pub fn hat(&self) -> Self {
        if self.weight() % 2 == 0 {
            *self
        } else {
            self.complement()
        }
    }
}

/// Number of positions where x and y differ.
pub fn hamming_distance(x: &BitString, y: &BitString) -> Result<u32> {
    if x.n != y.n {
        return Err(Error::LengthMismatch(x.n(), y.n()));
    }
    Ok((x.value ^ y.value).count_ones())
}

/// Second least significant bit of d; equals d(d-1)/2 mod 2.
pub fn b1(d: u32) -> u8 {
    ((d >> 1) & 1) as u8
}

/// Distance between packed values of equal width; hot-loop variant of
/// [`hamming_distance`].
#[inline]
pub fn dist_packed(x: usize, y: usize) -> u32 {
    (x ^ y).count_ones()
}

fn mask(n: usize) -> u32 {
    ((1u64 << n) - 1) as u32
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n() {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_N {
            return Err(Error::InvalidBitString(format!(
                "length {} outside 1..={MAX_N}",
                s.len()
            )));
        }
        let mut value = 0usize;
        for c in s.chars() {
            value <<= 1;
            match c {
                '0' => {}
                '1' => value |= 1,
                _ => {
                    return Err(Error::InvalidBitString(format!(
                        "unexpected character {c:?}"
                    )))
                }
            }
        }
        BitString::new(value, s.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn distance_basics() {
        assert_eq!(hamming_distance(&bs("000"), &bs("000")).unwrap(), 0);
        assert_eq!(hamming_distance(&bs("110"), &bs("011")).unwrap(), 2);
        let x = bs("10110");
        assert_eq!(hamming_distance(&x, &x.complement()).unwrap(), 5);
        assert!(hamming_distance(&bs("00"), &bs("000")).is_err());
    }

    #[test]
    fn distance_symmetric_and_translation_invariant() {
        for n in 1..=6 {
            for g in 0..(1usize << n) {
                let g = BitString::new(g, n).unwrap();
                for a in 0..(1usize << n) {
                    let a = BitString::new(a, n).unwrap();
                    for x in 0..(1usize << n) {
                        let x = BitString::new(x, n).unwrap();
                        let d = hamming_distance(&a, &x).unwrap();
                        assert_eq!(d, hamming_distance(&x, &a).unwrap());
                        let ga = g.xor(&a).unwrap();
                        let gx = g.xor(&x).unwrap();
                        assert_eq!(d, hamming_distance(&ga, &gx).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn b1_table() {
        assert_eq!(b1(0), 0);
        assert_eq!(b1(1), 0);
        assert_eq!(b1(2), 1);
        assert_eq!(b1(3), 1);
        assert_eq!(b1(4), 0);
        assert_eq!(b1(6), 1);
    }

    #[test]
    fn b1_matches_triangular_number_parity() {
        for d in 0u64..=200 {
            let expect = ((d * d.saturating_sub(1) / 2) % 2) as u8;
            assert_eq!(b1(d as u32), expect, "d = {d}");
        }
    }

    #[test]
    fn b1_alternates_with_period_two_shift() {
        for d in 0..=100u32 {
            assert_ne!(b1(d + 2), b1(d));
        }
    }

    #[test]
    fn hat_examples() {
        assert_eq!(bs("0000").hat(), bs("0000"));
        assert_eq!(bs("100").hat(), bs("011"));
        assert_eq!(bs("11").hat(), bs("11"));
    }

    #[test]
    fn hat_bijective_even_not_injective_odd() {
        for n in 1..=7 {
            let images: std::collections::HashSet<_> =
                BitString::all(n).unwrap().map(|x| x.hat()).collect();
            if n % 2 == 0 {
                assert_eq!(images.len(), 1 << n, "hat must be a bijection for n = {n}");
                for x in BitString::all(n).unwrap() {
                    assert_eq!(x.hat().hat(), x, "hat must be an involution for n = {n}");
                }
            } else {
                assert!(images.len() < 1 << n, "hat must not be injective for n = {n}");
            }
        }
    }

    #[test]
    fn complement_involution() {
        for n in 1..=6 {
            for x in BitString::all(n).unwrap() {
                assert_eq!(x.complement().complement(), x);
            }
        }
    }

    #[test]
    fn string_roundtrip_and_bit_order() {
        let x = bs("011");
        assert_eq!(x.to_string(), "011");
        assert_eq!(x.bit(0), 0);
        assert_eq!(x.bit(1), 1);
        assert_eq!(x.value(), 3);
        assert!("".parse::<BitString>().is_err());
        assert!("10102".parse::<BitString>().is_err());
        assert!(BitString::new(0, 21).is_err());
        assert!(BitString::new(4, 2).is_err());
    }

    #[test]
    fn lemma_3_3_identity_exhaustive() {
        // a.x + wt(a) wt(x) = a.hat(x)  (mod 2)
        for n in 1..=8 {
            for a in BitString::all(n).unwrap() {
                for x in BitString::all(n).unwrap() {
                    let lhs = (a.dot(&x).unwrap() as u32 + a.weight() * x.weight()) % 2;
                    let rhs = a.dot(&x.hat()).unwrap() as u32;
                    assert_eq!(lhs, rhs, "n={n} a={a} x={x}");
                }
            }
        }
    }
}
