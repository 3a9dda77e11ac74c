//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Word or presentation text failed to parse. `pos` is a byte offset
    /// into the input.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A generator name that is not part of the alphabet in scope.
    #[error("unknown generator `{name}` at byte {pos}")]
    UnknownGenerator { name: String, pos: usize },

    /// Two words over different alphabets were combined.
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: String, right: String },

    /// A commutator needs at least one argument.
    #[error("commutator of an empty list of words")]
    EmptyCommutator,

    /// The requested computation would exceed a truncation cap.
    #[error("weight exceeds cap {cap}")]
    ExceedsCap { cap: usize },

    /// A configured resource budget was exhausted.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Invalid input that is not a parse error (bad index, bad parameter).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// An internal invariant was violated. Reaching this is a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
