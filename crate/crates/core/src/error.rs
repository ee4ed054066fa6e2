use thiserror::Error;

/// Errors raised by the structure, age and construction APIs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("invalid structure: {0}")]
    Structure(String),

    #[error("element {element} out of range for a structure of size {size}")]
    OutOfRange { element: usize, size: usize },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("search budget exhausted after {nodes} nodes")]
    Budget { nodes: u64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
