use thiserror::Error;

use crate::ring::RingSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingSpec, RingSpec),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{0}")]
    Domain(String),

    #[error("invalid complex at degree {degree}: {reason}")]
    InvalidComplex { degree: usize, reason: String },

    #[error("invalid chain map at degree {degree}: {reason}")]
    InvalidMap { degree: usize, reason: String },

    #[error("complex is not minimal: unit entry in d_{degree} at ({row}, {col})")]
    NotMinimal { degree: usize, row: usize, col: usize },

    #[error("search space of {required} candidates exceeds the guard of {budget}")]
    Guard { required: u128, budget: u128 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
