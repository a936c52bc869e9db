use thiserror::Error;

/// Failure modes shared across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace is not invariant under the power-{power} shift")]
    NotInvariant { power: usize },
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("top index mismatch: expected {expected}, found {found}")]
    TopIndexMismatch { expected: usize, found: usize },
    #[error("independence hypothesis fails: {0}")]
    IndependenceFails(String),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("subspace is not spanned by standard basis vectors")]
    NonCoordinate,
    #[error("support matches no recognised lattice pattern")]
    UnrecognizedPattern,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("coefficient at index {0} is zero")]
    ZeroCoefficient(usize),
    #[error("support does not match the requested case: {0}")]
    SupportMismatch(String),
    #[error("classification failed: {0}")]
    Unclassifiable(String),
    #[error("could not reach the requested dimension {0}")]
    UnreachableDimension(usize),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
