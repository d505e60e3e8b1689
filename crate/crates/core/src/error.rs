//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An oracle was queried outside its domain (e.g. gauge of a body that
    /// does not have the origin in its interior).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Input fails a rank / non-degeneracy requirement.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The (inner, outer) oracle combination is not decidable exactly.
    #[error("unsupported oracle pair: {0}")]
    UnsupportedPair(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// A theorem hypothesis does not hold for the supplied bodies.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Requested hyperplane section is empty.
    #[error("empty section: {0}")]
    EmptySection(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
