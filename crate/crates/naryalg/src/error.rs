use thiserror::Error;

/// Errors surfaced by the algebra engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands live on different spaces")]
    SpaceMismatch,
    #[error("argument count {needed} exceeds the arity budget {cap}")]
    ArityBudget { needed: usize, cap: usize },
    #[error("invalid arity: {0}")]
    InvalidArity(String),
    #[error("map is not graded skew symmetric: {0}")]
    NotSkew(String),
    #[error("linear map has no declared degree")]
    MissingDegree,
    #[error("homogeneity violation: {0}")]
    Homogeneity(String),
    #[error("parity obstruction: {0}")]
    Parity(String),
    #[error("not an ideal: witness position {position}, basis tuple {tuple:?}")]
    NotIdeal { position: usize, tuple: Vec<usize> },
    #[error("subspace is not graded: {0}")]
    NotGraded(String),
    #[error("graded inputs are not supported here: {0}")]
    GradedUnsupported(String),
    #[error("defective structure: {0}")]
    Defective(String),
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
