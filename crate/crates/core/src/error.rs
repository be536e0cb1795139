use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("coordinate index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("incompatible fiber kinds: {0}")]
    IncompatibleKinds(String),

    #[error("geometry hypotheses violated:\n{0}")]
    Geometry(String),

    #[error("requested λ-order {requested} exceeds the configured order {available}")]
    OrderExceeded { requested: usize, available: usize },

    #[error("negative power of λ in {0}")]
    NegativeLambda(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
