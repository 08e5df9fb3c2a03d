use thiserror::Error;

/// Errors shared across the crate. The CLI maps these onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("containment violated: {0}")]
    Containment(String),
    #[error("points not ordered: {0}")]
    Order(String),
    #[error("malformed structure: {0}")]
    Structure(String),
    #[error("point outside shape support: {0}")]
    Support(String),
    #[error("module is not exact: {0}")]
    NotExact(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("value out of range: {0}")]
    Range(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
