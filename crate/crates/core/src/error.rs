use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input density operator violates Hermiticity, trace or positivity.
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// A caller broke an operation's precondition (dimensions, ranges, missing config).
    #[error("contract violation: {0}")]
    Contract(String),
    /// An iterative numeric routine failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
