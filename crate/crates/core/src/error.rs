use thiserror::Error;

/// Failure kinds shared by every layer of the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("resource bound: {0}")]
    Resource(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("generic evaluation points disagree: {0}")]
    GenericPoint(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Verification(_) => 1,
            Error::Input(_) | Error::Degenerate(_) => 2,
            Error::Resource(_) | Error::GenericPoint(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
