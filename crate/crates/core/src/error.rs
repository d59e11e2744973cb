use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// The CLI maps each variant onto a stable exit code, so new failure modes
/// should reuse a variant rather than add one where possible.
#[derive(Debug, Error)]
pub enum Error {
    /// Two factors disagree on a shared variable's cardinality, or a factor
    /// references a variable the model does not have.
    #[error("model inconsistency: {0}")]
    Inconsistent(String),

    /// An operation was called outside its precondition.
    #[error("invalid usage: {0}")]
    Usage(String),

    /// A memory budget or state-space cap would be exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The mini-bucket bound cannot hold some factor.
    #[error("z-bound {z} is infeasible: {msg}")]
    InfeasibleZ { z: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
