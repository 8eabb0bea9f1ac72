//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of the operands do not agree (non-square input, mismatched
    /// ambient or sub dimensions, ...).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Numerically rank-deficient input where full rank is required.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An iterative kernel (eigensolver, SVD) failed to converge, or a
    /// floating-point result left its admissible range.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Matrix required to be positive semidefinite has a significantly
    /// negative eigenvalue.
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.6e}")]
    NotPsd { min_eig: f64 },

    /// Graph failed chordality verification; carries one chordless cycle of
    /// length >= 4 (0-based vertex labels).
    #[error("graph is not chordal: chordless cycle {cycle:?}")]
    NotChordal { cycle: Vec<usize> },

    /// Caller violated an argument contract (out-of-range k, N < 2, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Every packing restart ended degenerate.
    #[error("packing failed: {0}")]
    PackingFailed(String),

    /// Malformed input document (matrix/frame JSON, edge list, SDP export).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
