use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An index or dimension outside the admissible range of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Numerically rank-deficient or otherwise degenerate input.
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// A functional that has no implementation for the given body or order.
    #[error("not available: {0}")]
    NotAvailable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid value for `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
