use thiserror::Error;

/// Errors raised by matrix construction, verification and the solution builders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("size {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("representation dimension {dim} exceeds cap {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("non-finite entry produced by {0}")]
    NonFinite(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("relation {relation} failed: residual {residual:e} exceeds bound {bound:e}")]
    VerificationFailed {
        relation: String,
        residual: f64,
        bound: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rho_{index} is infinite for Q = {q}")]
    RhoUndefined { index: usize, q: f64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
