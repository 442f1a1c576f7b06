//! Bitstring arithmetic, distance functions, and the permutation-group
//! machinery the simulator and sweeps are built on.

pub mod assignment;
pub mod bitstring;
pub mod hfunction;
pub mod perm;

pub use assignment::SigmaAssignment;
pub use bitstring::{b1, dist_packed, hamming_distance, BitString, MAX_N};
pub use hfunction::{concept_value, distinct_concepts, distinct_concepts_fast, HFunction};
pub use perm::{factorials, format_cycles, parse_cycles, Permutation};
