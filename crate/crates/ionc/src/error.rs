//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An edge list or node index is structurally invalid for its graph.
    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    /// An operation was called with arguments that violate its contract.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A universe plus input-graph collection fails validation.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A node count exceeds a configured or hard limit.
    #[error("{what}: {n} nodes exceeds limit of {limit}")]
    TooManyNodes {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    /// Answer-set output text could not be interpreted.
    #[error("answer set parse error at line {line}: {msg}")]
    AnswerParse { line: usize, msg: String },

    /// A statistics operation received an empty solution set.
    #[error("empty solution set: {0}")]
    EmptySolutionSet(&'static str),

    /// An instance or solutions document is self-inconsistent.
    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
