use std::io;

use thiserror::Error;

/// Errors raised by the runtime, arrays and algorithms.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("task submission rejected: {0}")]
    Submission(String),

    /// A task (or one of its ancestors) failed; `op_tag` names the task that failed first.
    #[error("task '{op_tag}' failed: {message}")]
    TaskFailed { op_tag: String, message: String },

    #[error("{} task(s) failed: {}", failed.len(), failed.join(", "))]
    Barrier { failed: Vec<String> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
