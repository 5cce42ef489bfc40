//! Error type shared by every module.
//!
//! Two categories only: `Input` for rejected arguments (bad dimensions,
//! out-of-strip exponents, malformed groups) and `Numerical` for
//! computations that ran but failed to converge or lost too much
//! precision. The CLI maps them to exit codes 1 and 2.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The caller handed us something the operation cannot accept.
    #[error("input error: {0}")]
    Input(String),
    /// The computation ran but did not reach the requested accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Machine-readable category tag, stable across releases.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Numerical(_) => "numerical",
        }
    }

    /// Process exit code the CLI uses for this category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 1,
            Error::Numerical(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
