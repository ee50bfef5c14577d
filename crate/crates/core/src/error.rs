use thiserror::Error;

/// Errors produced by the formation metric library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate geodesic: {reason} (deterministic tie-break available: {tie_break})")]
    DegenerateGeodesic { reason: String, tie_break: String },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("configuration is not supported in an open arc shorter than pi")]
    NotSemicircle,

    #[error("unsupported instance: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
