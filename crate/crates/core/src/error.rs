use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid algebra presentation: {0}")]
    InvalidAlgebra(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("idempotent search failed on an endomorphism algebra of dimension {dim} (radical quotient rank {rank}) over {field}; retry with another field")]
    IdempotentSearchFailed { dim: usize, rank: usize, field: String },
    #[error("resource limit reached: {0}")]
    ResourceLimit(String),
    #[error("window exhausted: {0}")]
    WindowExhausted(String),
    #[error("unknown indecomposable: {0}")]
    UnknownIndecomposable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("undefined phase: {0}")]
    UndefinedPhase(String),
    #[error("operation needs a concrete realization (snapshot was loaded from file): {0}")]
    RealizationRequired(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
