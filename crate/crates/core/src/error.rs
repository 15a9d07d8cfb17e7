use std::path::PathBuf;

use thiserror::Error;

use crate::probability::PmfError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("state vector must contain at least one component")]
    EmptyVector,

    #[error("component index {index} is out of range for a vector of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("level {level} exceeds the maximum state {max_state}")]
    LevelOutOfRange { level: usize, max_state: usize },

    #[error("maximum state must be between 1 and 255, got {0}")]
    InvalidMaxState(usize),

    #[error("k = {k} is invalid for a k-out-of-n node with {n} children")]
    InvalidK { k: usize, n: usize },

    #[error("structure references {arity} components but {given} were supplied")]
    ArityMismatch { arity: usize, given: usize },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("state space of {size} vectors exceeds the enumeration limit of {limit}")]
    ExplosionLimit { size: String, limit: u64 },

    #[error("invalid distribution for {subject}: {source}")]
    InvalidPmf {
        subject: String,
        #[source]
        source: PmfError,
    },

    #[error("component distributions disagree on the number of states ({expected} vs {found})")]
    StateCountMismatch { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("dominance hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
