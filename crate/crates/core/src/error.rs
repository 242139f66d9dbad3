//! Crate-wide error type.

use thiserror::Error;

/// Errors returned by library operations.
///
/// Theorem hypotheses that fail on concrete inputs are reported either as
/// structured results (see [`crate::lll::BoundOutcome`]) or as
/// [`Error::Inapplicable`]; both mean "the analysis does not apply here",
/// not "the input is malformed".
#[derive(Debug, Error)]
pub enum Error {
    /// Input dimensions are inconsistent (vector lengths, qubit counts,
    /// matrix shapes).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numeric or structural input is outside the documented domain of
    /// the operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix that must be Hermitian is not, within tolerance.
    #[error("matrix is not Hermitian (deviation {deviation:.3e} exceeds {tolerance:.1e})")]
    NotHermitian {
        /// Frobenius norm of `m - m†`.
        deviation: f64,
        /// Largest deviation accepted.
        tolerance: f64,
    },

    /// An iterative solver failed to reach its tolerance within its
    /// iteration cap.
    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    /// The hypothesis of the theorem backing this operation does not hold
    /// for the given inputs; the analysis is inapplicable rather than wrong.
    #[error("inapplicable: {0}")]
    Inapplicable(String),

    /// An internal consistency check failed. This indicates a bug in the
    /// library, not in the caller's input.
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    /// JSON (de)serialization failure.
    #[error("serialization: {0}")]
    Serialization(#[from] serde_json::Error),

    /// File I/O failure.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
