use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Process exit code used by the command line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Degenerate(_) => 3,
            Error::Precision(_) => 4,
            Error::Verification(_) => 5,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
