use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("too few snapshots: need {needed}, the tau-series has {available}")]
    TooFewSnapshots { needed: usize, available: usize },
    #[error("embedding dimension {dim} exceeds the node count {nodes}")]
    DimensionTooLarge { dim: usize, nodes: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("node index {0} is outside the node universe")]
    UnknownNode(usize),
    #[error("only {available} non-edges available, {requested} requested")]
    InsufficientNonEdges { requested: usize, available: usize },
    #[error("labels contain a single class")]
    SingleClass,
    #[error("non-finite feature value at example {0}")]
    NonFinite(usize),
    #[error("decomposition did not converge: {0}")]
    NonConvergence(String),
    #[error("missing cell: {0}")]
    MissingCell(String),
    #[error("config: {0}")]
    Config(String),
    #[error("report output: {0}")]
    Output(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
