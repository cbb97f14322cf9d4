use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument error: {0}")]
    Argument(String),
    /// Input data violates a structural requirement (monotonicity, marginals, config field).
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical instability: {0}")]
    NumericalInstability(String),
    /// A computation would exceed a configured budget.
    #[error("resource error: {0}")]
    Resource(String),
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error class: 1 for input problems, 2 for
    /// numerical-instability and resource failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericalInstability(_) | Error::Resource(_) | Error::Io(_) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
