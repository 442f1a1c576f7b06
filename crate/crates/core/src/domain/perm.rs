//! Permutations of the response set, with cycle-notation I/O and
//! lexicographic one-line indexing.
//!
//! Labels are 1-based in all text I/O to match cycle notation; storage and
//! the hot-loop accessors are 0-based.

use std::fmt;

use crate::error::{Error, Result};

/// Degrees are small (response registers), but the factorial arithmetic in
/// the lexicographic index is exact up to 20.
pub const MAX_DEGREE: usize = 20;

/// An element of S_r in one-line form: `images[b]` is the image of point b
/// (0-based).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(r: usize) -> Result<Self> {
        check_degree(r)?;
        Ok(Self {
            images: (0..r as u8).collect(),
        })
    }

    /// Builds from 1-based one-line images, e.g. `[2, 3, 1]` for (123).
    pub fn from_one_line(images: &[usize]) -> Result<Self> {
        let r = images.len();
        check_degree(r)?;
        let mut seen = vec![false; r];
        let mut zero_based = Vec::with_capacity(r);
        for &im in images {
            if im < 1 || im > r {
                return Err(Error::SymbolOutOfRange { symbol: im, degree: r });
            }
            if seen[im - 1] {
                return Err(Error::InvalidPermutation(format!(
                    "image {im} repeated; not a bijection"
                )));
            }
            seen[im - 1] = true;
            zero_based.push((im - 1) as u8);
        }
        Ok(Self { images: zero_based })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 1-based point, checked.
    pub fn apply(&self, b: usize) -> Result<usize> {
        if b < 1 || b > self.degree() {
            return Err(Error::SymbolOutOfRange {
                symbol: b,
                degree: self.degree(),
            });
        }
        Ok(self.images[b - 1] as usize + 1)
    }

    /// Image of a 0-based point; hot-loop accessor.
    #[inline]
    pub fn image(&self, b: usize) -> usize {
        self.images[b] as usize
    }

    /// 0-based one-line images.
    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(b, &im)| b == im as usize)
    }

    /// self after other: (self * other)(b) = self(other(b)).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        let images = other
            .images
            .iter()
            .map(|&b| self.images[b as usize])
            .collect();
        Ok(Self { images })
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0u8; self.degree()];
        for (b, &im) in self.images.iter().enumerate() {
            images[im as usize] = b as u8;
        }
        Self { images }
    }

    pub fn power(&self, d: u32) -> Self {
        let mut acc = Self::identity(self.degree()).expect("degree already validated");
        for _ in 0..d {
            acc = acc.compose(self).expect("equal degrees");
        }
        acc
    }

    /// Rank in the lexicographic order of one-line forms, 0 for the identity.
    pub fn lex_rank(&self) -> u64 {
        let r = self.degree();
        let mut rank = 0u64;
        let mut fact = factorials(r);
        fact.truncate(r);
        for i in 0..r {
            let smaller = self.images[i + 1..]
                .iter()
                .filter(|&&x| x < self.images[i])
                .count() as u64;
            rank += smaller * fact[r - 1 - i];
        }
        rank
    }

    /// Inverse of [`Self::lex_rank`].
    pub fn from_lex_rank(rank: u64, r: usize) -> Result<Self> {
        check_degree(r)?;
        let fact = factorials(r);
        if rank >= fact[r] {
            return Err(Error::InvalidPermutation(format!(
                "rank {rank} out of range for degree {r}"
            )));
        }
        let mut remaining: Vec<u8> = (0..r as u8).collect();
        let mut images = Vec::with_capacity(r);
        let mut rank = rank;
        for i in 0..r {
            let f = fact[r - 1 - i];
            let pos = (rank / f) as usize;
            rank %= f;
            images.push(remaining.remove(pos));
        }
        Ok(Self { images })
    }

    /// Disjoint cycles, each rotated to start at its smallest element and
    /// sorted by that element; fixed points omitted.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let r = self.degree();
        let mut seen = vec![false; r];
        let mut cycles = Vec::new();
        for start in 0..r {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut b = self.images[start] as usize;
            while b != start {
                seen[b] = true;
                cycle.push(b);
                b = self.images[b] as usize;
            }
            if cycle.len() > 1 {
                cycles.push(cycle.into_iter().map(|b| b + 1).collect());
            }
        }
        cycles
    }
}

/// r! for all degrees up to r.
pub fn factorials(r: usize) -> Vec<u64> {
    let mut fact = vec![1u64; r + 1];
    for k in 1..=r {
        fact[k] = fact[k - 1] * k as u64;
    }
    fact
}

/// Parses a product of disjoint cycles over {1..r}. Fixed points may be
/// omitted; "(1)" denotes the identity. Symbols are single decimal digits,
/// optionally separated by spaces or commas.
pub fn parse_cycles(text: &str, r: usize) -> Result<Permutation> {
    check_degree(r)?;
    if r > 9 {
        return Err(Error::CycleParse(format!(
            "cycle text supports degrees up to 9, got {r}"
        )));
    }
    let mut images: Vec<Option<u8>> = vec![None; r];
    let mut used = vec![false; r];
    let mut chars = text.chars().peekable();
    let mut any_cycle = false;
    while let Some(c) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if c != '(' {
            return Err(Error::CycleParse(format!(
                "expected '(' in {text:?}, found {c:?}"
            )));
        }
        let mut cycle: Vec<usize> = Vec::new();
        loop {
            match chars.next() {
                Some(')') => break,
                Some(d) if d.is_ascii_digit() => {
                    let sym = d.to_digit(10).unwrap() as usize;
                    if sym < 1 || sym > r {
                        return Err(Error::SymbolOutOfRange { symbol: sym, degree: r });
                    }
                    if used[sym - 1] {
                        return Err(Error::CycleParse(format!(
                            "symbol {sym} repeated in {text:?}"
                        )));
                    }
                    used[sym - 1] = true;
                    cycle.push(sym);
                }
                Some(s) if s.is_whitespace() || s == ',' => continue,
                Some(other) => {
                    return Err(Error::CycleParse(format!(
                        "unexpected {other:?} in {text:?}"
                    )))
                }
                None => {
                    return Err(Error::CycleParse(format!("unclosed cycle in {text:?}")))
                }
            }
        }
        if cycle.is_empty() {
            return Err(Error::CycleParse(format!("empty cycle in {text:?}")));
        }
        any_cycle = true;
        for i in 0..cycle.len() {
            let from = cycle[i] - 1;
            let to = cycle[(i + 1) % cycle.len()] - 1;
            images[from] = Some(to as u8);
        }
    }
    if !any_cycle {
        return Err(Error::CycleParse(format!("no cycles in {text:?}")));
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(b, im)| im.unwrap_or(b as u8))
        .collect();
    Ok(Permutation { images })
}

/// Canonical cycle text; inverse of [`parse_cycles`].
pub fn format_cycles(p: &Permutation) -> String {
    let cycles = p.cycles();
    if cycles.is_empty() {
        return "(1)".to_string();
    }
    let mut out = String::new();
    for cycle in cycles {
        out.push('(');
        for sym in cycle {
            out.push_str(&sym.to_string());
        }
        out.push(')');
    }
    out
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_cycles(self))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}: {}]", self.degree(), format_cycles(self))
    }
}

fn check_degree(r: usize) -> Result<()> {
    if r < 1 || r > MAX_DEGREE {
        return Err(Error::InvalidPermutation(format!(
            "degree {r} outside 1..={MAX_DEGREE}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, r: usize) -> Permutation {
        parse_cycles(text, r).unwrap()
    }

    #[test]
    fn parse_basics() {
        assert!(p("(1)", 3).is_identity());
        let c = p("(123)", 3);
        assert_eq!(c.apply(1).unwrap(), 2);
        assert_eq!(c.apply(2).unwrap(), 3);
        assert_eq!(c.apply(3).unwrap(), 1);
        let t = p("(12)", 2);
        assert_eq!(t.apply(1).unwrap(), 2);
        assert_eq!(t.apply(2).unwrap(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_cycles("(11)", 3).is_err());
        assert!(parse_cycles("(14)", 3).is_err());
        assert!(parse_cycles("(12", 3).is_err());
        assert!(parse_cycles("12)", 3).is_err());
        assert!(parse_cycles("()", 3).is_err());
        assert!(parse_cycles("", 3).is_err());
        assert!(parse_cycles("(12)(23)", 3).is_err(), "cycles must be disjoint");
    }

    #[test]
    fn format_is_canonical() {
        assert_eq!(format_cycles(&p("(1)", 4)), "(1)");
        assert_eq!(format_cycles(&p("(231)", 3)), "(123)");
        assert_eq!(format_cycles(&p("(34)(12)", 4)), "(12)(34)");
        let q = Permutation::from_one_line(&[3, 2, 1]).unwrap();
        assert_eq!(format_cycles(&q), "(13)");
    }

    #[test]
    fn roundtrip_all_s4() {
        for rank in 0..24 {
            let q = Permutation::from_lex_rank(rank, 4).unwrap();
            let text = format_cycles(&q);
            assert_eq!(parse_cycles(&text, 4).unwrap(), q, "text {text}");
        }
    }

    #[test]
    fn compose_power_inverse() {
        let c = p("(123)", 3);
        assert!(c.compose(&p("(132)", 3)).unwrap().is_identity());
        assert_eq!(c.power(2), p("(132)", 3));
        assert!(p("(12)", 2).power(2).is_identity());
        assert!(c.compose(&c.inverse()).unwrap().is_identity());
        assert!(c.power(0).is_identity());
        assert!(c.compose(&p("(12)", 2)).is_err());
    }

    #[test]
    fn compose_applies_right_factor_first() {
        // (12) then (23): 1 -> 2 -> 3.
        let left = p("(23)", 3);
        let right = p("(12)", 3);
        let composed = left.compose(&right).unwrap();
        assert_eq!(composed.apply(1).unwrap(), 3);
    }

    #[test]
    fn lex_order_of_s3() {
        let expected_one_line: [[usize; 3]; 6] = [
            [1, 2, 3],
            [1, 3, 2],
            [2, 1, 3],
            [2, 3, 1],
            [3, 1, 2],
            [3, 2, 1],
        ];
        for (rank, line) in expected_one_line.iter().enumerate() {
            let q = Permutation::from_lex_rank(rank as u64, 3).unwrap();
            assert_eq!(q, Permutation::from_one_line(line).unwrap());
            assert_eq!(q.lex_rank(), rank as u64);
        }
        assert!(Permutation::from_lex_rank(6, 3).is_err());
    }

    #[test]
    fn apply_checks_range() {
        let c = p("(123)", 3);
        assert!(c.apply(0).is_err());
        assert!(c.apply(4).is_err());
    }
}
