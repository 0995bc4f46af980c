use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid axis: {0}")]
    InvalidAxis(String),

    #[error("grid too large: {0} nodes")]
    GridTooLarge(u128),

    #[error("index {index} out of range for {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("singular state for moving frame: {0}")]
    Singular(String),

    #[error("empty input set")]
    EmptyInputSet,

    #[error("invalid noise model: {0}")]
    Noise(String),

    #[error("brute-force enumeration needs {leaves} leaf evaluations (limit {limit})")]
    TooManyLeaves { leaves: u128, limit: u128 },

    #[error("horizon {horizon} exceeds maximum depth {max_depth}")]
    TooDeep { horizon: usize, max_depth: usize },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("node {index} at {coords}: {source}")]
    Node {
        index: usize,
        coords: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed table file: {0}")]
    Format(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid slice: {0}")]
    Slice(String),

    #[error("hash mismatch for {path}: manifest {expected}, file {actual}")]
    HashMismatch {
        path: PathBuf,
        expected: String,
        actual: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn at_stage(self, stage: usize) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_node(self, index: usize, coords: &[f64]) -> Self {
        Error::Node {
            index,
            coords: format!("{coords:?}"),
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
