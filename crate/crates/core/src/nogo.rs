//! Executable form of the no-go analysis: the quantum learning matrix, the
//! Hadamard criterion, and the exhaustive scan over every binary function of
//! the Hamming distance.
//!
//! A function h passes for width n exactly when its concept class has the
//! full 2^n members and the sign matrix L_{xa} = (-1)^{h(dist(a,x))} has
//! pairwise orthogonal columns. Passing functions are classified as shifts
//! of the second-least-significant-bit function.

use serde::{Deserialize, Serialize};

use crate::domain::hfunction::MAX_EXHAUSTIVE_N;
use crate::domain::{b1, distinct_concepts_fast, HFunction};
use crate::error::{Error, Result};

/// Square sign matrix with entries +-1, columns bit-packed (bit set = -1).
#[derive(Clone, Debug)]
pub struct LearningMatrix {
    size: usize,
    columns: Vec<Vec<u64>>,
}

impl LearningMatrix {
    /// Packs a square matrix of +-1 rows; anything else is rejected.
    pub fn from_signs(rows: &[Vec<i8>]) -> Result<Self> {
        let size = rows.len();
        if size == 0 || rows.iter().any(|r| r.len() != size) {
            return Err(Error::ShapeMismatch(
                "learning matrix must be square and nonempty".into(),
            ));
        }
        let words = size.div_ceil(64);
        let mut columns = vec![vec![0u64; words]; size];
        for (x, row) in rows.iter().enumerate() {
            for (a, &v) in row.iter().enumerate() {
                match v {
                    1 => {}
                    -1 => columns[a][x / 64] |= 1 << (x % 64),
                    _ => {
                        return Err(Error::ShapeMismatch(format!(
                            "entry ({x},{a}) is {v}, not +-1"
                        )))
                    }
                }
            }
        }
        Ok(Self { size, columns })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry at row x, column a.
    pub fn entry(&self, x: usize, a: usize) -> i8 {
        if (self.columns[a][x / 64] >> (x % 64)) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|x| (0..self.size).all(|a| self.entry(x, a) == self.entry(a, x)))
    }

    /// Inner product of two columns.
    pub fn column_dot(&self, a: usize, b: usize) -> i64 {
        let differing: u32 = self.columns[a]
            .iter()
            .zip(&self.columns[b])
            .map(|(u, v)| (u ^ v).count_ones())
            .sum();
        self.size as i64 - 2 * differing as i64
    }
}

/// L_{xa} = (-1)^{h(dist(a,x))} over all x, a in Z_2^n.
pub fn learning_matrix(h: &HFunction) -> Result<LearningMatrix> {
    let n = h.n();
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::SizeLimit(format!(
            "learning_matrix needs n <= {MAX_EXHAUSTIVE_N}, got {n}"
        )));
    }
    let size = 1usize << n;
    let words = size.div_ceil(64);
    let mut columns = vec![vec![0u64; words]; size];
    for (a, col) in columns.iter_mut().enumerate() {
        for x in 0..size {
            let d = (a ^ x).count_ones() as usize;
            if h.value(d) == 1 {
                col[x / 64] |= 1 << (x % 64);
            }
        }
    }
    Ok(LearningMatrix { size, columns })
}

/// True iff every pair of distinct columns is orthogonal.
pub fn is_hadamard(m: &LearningMatrix) -> bool {
    for a in 0..m.size {
        for b in (a + 1)..m.size {
            if m.column_dot(a, b) != 0 {
                return false;
            }
        }
    }
    true
}

/// The shift s in {0,1,2,3} with h(d) = b1(d + s) for all d, if one exists.
pub fn classify_translate(h: &HFunction) -> Option<u8> {
    (0u8..4).find(|&s| {
        (0..h.len()).all(|d| h.value(d) == b1(d as u32 + s as u32))
    })
}

/// One passing function of a scan.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PassingFunction {
    /// Value table h(0)..h(n) as a 0/1 string.
    pub h: String,
    /// Enumeration index (bit d of the index is h(d)).
    pub h_index: u32,
    /// Shift classifying h as a translate of the second-bit function.
    pub translate_shift: Option<u8>,
}

/// Result of scanning all 2^(n+1) functions at one width.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ScanReport {
    pub n: usize,
    pub total_functions: u64,
    /// Functions with full concept class and Hadamard learning matrix.
    pub passing: Vec<PassingFunction>,
    /// Functions whose concept class is degenerate (fewer than 2^n
    /// concepts); these fail the hypothesis of the no-go statement rather
    /// than its conclusion, so they are reported separately.
    pub degenerate_h_indices: Vec<u32>,
}

/// Scans every h : {0,..,n} -> {0,1}. Parallel over contiguous index chunks.
pub fn scan_all_h(n: usize, workers: usize) -> Result<ScanReport> {
    if n < 1 || n > MAX_EXHAUSTIVE_N {
        return Err(Error::SizeLimit(format!(
            "scan_all_h needs 1 <= n <= {MAX_EXHAUSTIVE_N}, got {n}"
        )));
    }
    let total = 1u32 << (n + 1);
    let workers = workers.clamp(1, total as usize);
    let chunk = total.div_ceil(workers as u32);
    let mut passing = Vec::new();
    let mut degenerate = Vec::new();
    let chunk_results: Vec<Result<(Vec<PassingFunction>, Vec<u32>)>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers as u32)
                .map(|w| {
                    scope.spawn(move || {
                        let lo = w * chunk;
                        let hi = ((w + 1) * chunk).min(total);
                        scan_chunk(n, lo, hi)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("scan worker")).collect()
        });
    for result in chunk_results {
        let (mut p, mut d) = result?;
        passing.append(&mut p);
        degenerate.append(&mut d);
    }
    Ok(ScanReport {
        n,
        total_functions: total as u64,
        passing,
        degenerate_h_indices: degenerate,
    })
}

fn scan_chunk(n: usize, lo: u32, hi: u32) -> Result<(Vec<PassingFunction>, Vec<u32>)> {
    let mut passing = Vec::new();
    let mut degenerate = Vec::new();
    for idx in lo..hi {
        let h = HFunction::from_index(idx, n)?;
        if distinct_concepts_fast(&h) < (1usize << n) {
            degenerate.push(idx);
            continue;
        }
        let matrix = learning_matrix(&h)?;
        if is_hadamard(&matrix) {
            passing.push(PassingFunction {
                h: h.to_string(),
                h_index: idx,
                translate_shift: classify_translate(&h),
            });
        }
    }
    Ok((passing, degenerate))
}
