use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidSpec(String),

    #[error("grid would have {points} points, above the limit of {limit}")]
    GridTooLarge { points: usize, limit: usize },

    #[error("field does not belong to this group/grid: {0}")]
    Mismatch(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("step budget exceeded: {steps} steps requested, limit {limit}")]
    TooManySteps { steps: usize, limit: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
