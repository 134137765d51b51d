use thiserror::Error;

/// Errors raised by the numeric pipeline.
///
/// Values are reported as `f64` so the error type does not depend on the
/// scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("value {value} lies outside the symbol range [{low}, {high}]")]
    Range { value: f64, low: f64, high: f64 },
    #[error("symbol is not monotone on (0, pi)")]
    NotMonotone,
    #[error("index ({row}, {col}) is out of range for order {order}")]
    Index { row: usize, col: usize, order: usize },
    #[error("bisection failed to converge after {iterations} iterations")]
    Convergence { iterations: usize },
    #[error("matrix is not positive definite (pivot {pivot} = {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("order {order} exceeds the limit {limit}")]
    Size { order: usize, limit: usize },
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("linear system is singular")]
    SingularSystem,
    #[error("expansion row {k} has only {available} usable samples")]
    InsufficientSamples { k: usize, available: usize },
    #[error("expansion kind does not match the requested method")]
    KindMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
