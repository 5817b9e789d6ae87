use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input is not valid UTF-8 (first bad byte at offset {offset})")]
    InputEncoding { offset: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("malformed input at line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("model violation: {0}")]
    ModelViolation(String),

    #[error("numeric precision failure: {0}")]
    NumericPrecision(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
