use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Pauli label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: String },

    #[error("qubit count mismatch: expected {expected}, got {actual}")]
    QubitMismatch { expected: usize, actual: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{first} and {second} do not anticommute")]
    NotAnticommuting { first: String, second: String },

    #[error("identity string {0} cannot belong to an anticommuting set")]
    IdentityElement(String),

    #[error("duplicate element {0}")]
    Duplicate(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("partition not certified: {0}")]
    Certification(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
