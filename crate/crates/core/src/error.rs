use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of a numerical routine.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid beta shape (alpha={alpha}, beta={beta}): {reason}")]
    InvalidShape {
        alpha: f64,
        beta: f64,
        reason: &'static str,
    },

    #[error("cannot draw {requested} items from a pool of {available}")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty pool: {0}")]
    EmptyPool(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("classifier has not been fitted")]
    Unfitted,

    #[error("labels of a masked pool are not visible")]
    MaskedLabels,

    #[error("index {index} out of range for pool of {len}")]
    InvalidIndex { index: usize, len: usize },

    #[error("index {0} selected more than once")]
    DuplicateIndex(usize),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
