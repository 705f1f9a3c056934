use thiserror::Error;

/// Errors raised by the geometry, graph, network and scenario layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyInput,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("agent id {id} out of range for a network of {n} agents")]
    AgentOutOfRange { id: usize, n: usize },

    #[error("communication graph is disconnected")]
    Disconnected,

    #[error("unsupported dimension {0} (expected 2)")]
    UnsupportedDimension(usize),

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
