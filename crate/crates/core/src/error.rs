//! Error type shared by all modules.

use thiserror::Error;

/// Errors reported by the exact-arithmetic pipeline.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian: entry ({row},{col}) is not the conjugate of ({col},{row})")]
    NotHermitian { row: usize, col: usize },

    #[error("matrix is not positive semidefinite")]
    NotPsd,

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("polynomial is not real-rooted")]
    NotRealRooted,

    #[error("polynomial is not monic")]
    NotMonic,

    #[error("enumeration guard exceeded: needs {required} but the guard allows {limit}")]
    GuardExceeded { limit: u64, required: u64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("interlacing violation: {0}")]
    InterlacingViolation(String),

    #[error("mixed characteristic polynomial is not real-rooted")]
    MixedCharNotRealRooted,

    #[error("evaluation point is not above the roots")]
    NotAboveRoots,

    #[error("precondition failed: {0}")]
    PreconditionFail(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("division by zero in exact field arithmetic")]
    DivisionByZero,

    #[error("negative radicand: quadratic field elements require a nonnegative radicand")]
    NegativeRadicand,

    #[error("internal invariant breached: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
