use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated an operation's precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A formula was evaluated outside its domain of definition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Root finding failed, usually because the bracket has no sign change.
    #[error("solver failure: {0}")]
    Solver(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
