//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MimError {
    /// Vector/matrix dimensions do not line up.
    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A probability vector failed validation (negative entry, bad sum, empty).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A transfer matrix failed validation (entry outside [0,1], row sum != 1).
    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    /// A scalar parameter is outside its documented domain.
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, MimError>;
