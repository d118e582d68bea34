use thiserror::Error;

/// Errors raised by construction, coding and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} does not fit in {width} bits")]
    WidthOutOfRange { index: usize, width: u32 },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid code parameters: {0}")]
    InvalidSpec(String),

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("enumeration of 2^{bits} words exceeds the 2^{cap} cap")]
    EnumerationTooLarge { bits: usize, cap: usize },

    #[error("no SNR bracket found: {0}")]
    BracketNotFound(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
