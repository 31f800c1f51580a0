use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Rejected fan input. The message names the offending rays or cones.
    #[error("{0}")]
    InvalidFan(String),

    #[error("fan is not complete: {0}")]
    NotComplete(String),

    #[error("divisor is not Cartier: {0}")]
    NotCartier(String),

    #[error("relation undefined for non-simplicial wall {0}")]
    NonSimplicialWall(String),

    #[error("invalid subdivision: {0}")]
    Subdivision(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("mutation budget exhausted after {0} attempts")]
    MutationBudgetExhausted(usize),

    #[error("integer overflow converting {0} for serialization")]
    Overflow(String),

    /// An internal consistency check failed. Always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
