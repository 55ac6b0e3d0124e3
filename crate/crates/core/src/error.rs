use thiserror::Error;

/// Errors raised by the arithmetic, evaluation and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sieve limit {requested} outside supported range 2..={max}")]
    Capacity { requested: u64, max: u64 },

    #[error("{what} = {value} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("length mismatch: expected at most {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular Euler factor at p = {p}: f(p) p^-s = 1")]
    SingularFactor { p: u64 },

    #[error("hypothesis violated: {0}")]
    BoundViolation(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(
    what: &'static str,
    value: impl Into<f64>,
    limit: impl Into<f64>,
) -> Error {
    Error::OutOfRange {
        what,
        value: value.into(),
        limit: limit.into(),
    }
}
