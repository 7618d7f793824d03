//! Error type shared across the crate.
//!
//! Mathematical assertion failures (a dual-route check disagreeing, a class
//! order escaping its search bound, …) are errors, not panics: callers such
//! as the CLI map them to a nonzero exit code with the failing assertion
//! named.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on user-supplied parameters failed (bad prime, odd
    /// weight, zero modulus, …).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A mathematical assertion failed. These indicate an arithmetic bug
    /// (or deliberate tampering in the negative-control self-test) and are
    /// always reported with the name of the failing check.
    #[error("assertion failed: {0}")]
    Assertion(String),

    /// An eigencharacter computation met an irreducible factor of degree
    /// larger than the supported bound (2); the characters are reported as
    /// incomplete rather than guessed.
    #[error("eigenvalue field degree {degree} exceeds the supported bound 2 at weight {weight}")]
    FieldDegreeUnsupported { weight: i64, degree: usize },

    /// Scalars from incompatible quadratic extensions were combined.
    #[error("incompatible quadratic extensions: sqrt({0}) vs sqrt({1})")]
    IncompatibleExtensions(num::BigInt, num::BigInt),

    /// Disk-cache I/O failed in a way that is not recoverable by
    /// recomputation (e.g. the cache directory cannot be created).
    #[error("cache error: {0}")]
    Cache(String),

    /// JSON (de)serialization failure.
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    /// Shorthand for a named assertion failure.
    pub fn assertion(msg: impl Into<String>) -> Self {
        Error::Assertion(msg.into())
    }

    /// Shorthand for a parameter error.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
