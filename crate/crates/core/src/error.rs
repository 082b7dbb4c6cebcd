use thiserror::Error;

/// Errors raised while constructing, parsing or evaluating S-boxes and
/// search configurations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("bit width {0} is outside the supported range 3..=8")]
    UnsupportedWidth(u32),
    #[error("expected {expected} table entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("value {value} at position {position} does not fit in {n} bits")]
    ValueOutOfRange { position: usize, value: u64, n: u32 },
    #[error("table is not a permutation: value {value} appears more than once")]
    NotBijective { value: u64 },
    #[error("index {index} is out of range for a table of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("swap indices must be distinct (both were {0})")]
    IdenticalIndices(usize),
    #[error("component selector must be nonzero")]
    ZeroSelector,
    #[error("cost accumulation exceeds 128 bits")]
    CostOverflow,
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
