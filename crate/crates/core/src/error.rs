use thiserror::Error;

/// Errors raised by the estimators, generators and the Monte Carlo engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid step signal: {0}")]
    InvalidSignal(String),

    #[error("invalid difference scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid error model: {0}")]
    InvalidModel(String),

    #[error("series too short: need at least {required} observations, got {actual}")]
    SeriesTooShort { required: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("experiment failed: {failed} of {total} replications failed (limit 1%)")]
    TooManyFailures { failed: usize, total: usize },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
