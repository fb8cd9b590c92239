use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("parameter out of domain: {0}")]
    Domain(String),
    /// A bound was asked for outside the region where it is proven.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An input (example, model, index) does not fit the object it is applied to.
    #[error("invalid input: {0}")]
    Input(String),
    /// The request is too large for an exact routine.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
