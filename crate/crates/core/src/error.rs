//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bit-string length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("bit-string width {0} outside supported range 1..={1}")]
    WidthOutOfRange(usize, usize),

    #[error("invalid bit string: {0}")]
    InvalidBitString(String),

    #[error("invalid h-function: {0}")]
    InvalidHFunction(String),

    #[error("permutation degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("cycle notation parse error: {0}")]
    CycleParse(String),

    #[error("symbol {symbol} out of range for degree {degree}")]
    SymbolOutOfRange { symbol: usize, degree: usize },

    #[error("assignment index {index} out of range (total {total})")]
    AssignmentIndexOutOfRange { index: u64, total: u128 },

    #[error("input too large for exhaustive computation: {0}")]
    SizeLimit(String),

    #[error("sweep budget exceeded: {work} assignments requested, budget {budget}")]
    BudgetExceeded { work: u128, budget: u64 },

    #[error("response state is not a unit vector (norm {0})")]
    NonUnitState(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{0} requires an even query width (hat map is a bijection only for even n), got n = {1}")]
    OddWidth(&'static str, usize),

    #[error("{0} requires an odd query width, got n = {1}")]
    EvenWidth(&'static str, usize),

    #[error("numerical integrity failure: {0}")]
    Numerical(String),

    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),

    #[error("checkpoint incompatible with requested configuration: {0}")]
    CheckpointMismatch(String),

    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),

    #[error("unknown verification suite: {0}")]
    UnknownSuite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
