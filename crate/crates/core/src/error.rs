use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A statistic or bound was requested outside of its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A randomization test was asked to compare a subset against itself or nothing.
    #[error("degenerate statistics: {0}")]
    Degenerate(String),

    #[error("malformed input in {source_id}, line {line}: {reason}")]
    Malformed {
        source_id: String,
        line: usize,
        reason: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
