use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An enumeration or state space would exceed its configured cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Arguments outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Rejected configuration (rates, geometry, schema).
    #[error("invalid configuration: {0}")]
    Validation(String),
    /// A numerical procedure could not continue.
    #[error("numeric abort: {0}")]
    Numeric(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
