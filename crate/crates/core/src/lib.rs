//! Simulation and numerical-optimization toolkit for single-query learning
//! from n-bit Hamming-distance oracles in the permutation model.
//!
//! An oracle holding a hidden string a answers a query x by acting on an
//! r-dimensional response register with a permutation assigned to the
//! Hamming distance dist(a, x). The crate provides:
//!
//! - [`domain`]: bitstrings, the second-bit and hat maps, concept classes,
//!   cycle-notation permutations, and an indexable enumeration of all
//!   distance-to-permutation assignments;
//! - [`statevec`]: exact statevector simulation of the query/response space
//!   with the transforms the learning pipeline needs;
//! - [`algo_a`]: the probability-1 single-query identification pipeline for
//!   even widths and its odd-width pair variant;
//! - [`srm`]: oracle-output ensembles, Gram matrices, the square-root
//!   measurement, rank analysis, and the two-state Helstrom closed form;
//! - [`sweep`]: exhaustive assignment sweeps with per-assignment multistart
//!   optimization of the response state, gauge reduction, deterministic
//!   parallel partitioning, and checkpoint/resume;
//! - [`nogo`]: learning-matrix construction, Hadamard testing, and the
//!   exhaustive scan over all binary functions of the distance;
//! - [`verify`]: named invariant suites runnable from the CLI.

pub mod algo_a;
pub mod domain;
pub mod error;
pub mod manifest;
pub mod nogo;
pub mod srm;
pub mod statevec;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
