//! Error types shared across the crate.
//!
//! Internal-consistency errors are deliberately separate from domain errors:
//! a domain error means the caller asked for something outside the contract,
//! while an internal-consistency error means a mathematical invariant the
//! engine relies on (Hecke stability, semisimplicity, predicted dimensions)
//! failed and the computation must abort loudly rather than continue.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("incompatible quadratic fields: sqrt({0}) vs sqrt({1})")]
    FieldMismatch(u128, u128),

    #[error("division by zero")]
    DivisionByZero,

    #[error("inexact series division: first failing coefficient at index {index}")]
    InexactDivision { index: usize },

    #[error("insufficient precision: need {needed} coefficients, have {available}")]
    Precision { needed: usize, available: usize },

    #[error("not a member of the space: first mismatch at coefficient index {index}")]
    NotAMember { index: usize },

    #[error("eigenform classification error: {0}")]
    Classification(String),

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("dataset error on line {line}: {msg}")]
    Dataset { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::InternalConsistency(msg.into())
    }
}
