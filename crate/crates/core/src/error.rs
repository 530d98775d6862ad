use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("duplicate instance id {id:?} in {source_name}")]
    DuplicateId { id: String, source_name: String },

    #[error("type error: {0}")]
    Type(String),

    #[error("unknown system {0:?}")]
    UnknownSystem(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{got} replicates requested, at least {min} required (override to allow)")]
    TooFewReplicates { got: usize, min: usize },

    #[error("exact enumeration needs N <= {max}, got N = {n}; use Monte Carlo mode instead")]
    SizeGuard { n: usize, max: usize },

    #[error("{0}")]
    Arity(String),

    #[error("inconsistent input: {0}")]
    Consistency(String),

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Statistical guard failures, as opposed to malformed input.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::InsufficientData(_) | Error::SizeGuard { .. } | Error::TooFewReplicates { .. }
        )
    }
}
