//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Error cases surfaced by the core routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside the mathematical domain of the routine
    /// (zero modulus, odd Bernoulli index, non-positive dimension, ...).
    Domain(String),
    /// The dimension parameter does not have the shape the routine needs
    /// (e.g. binary weight of `k` larger than two).
    Shape(String),
    /// The request is well-formed but exceeds what the routine can compute
    /// exactly with its configured limits.
    Capability(String),
    /// A hard cap intended to keep brute-force helpers honest was exceeded.
    Capacity(String),
    /// A claimed certificate failed verification.
    Certificate(String),
    /// A data record (factor table, cache file) failed validation.
    Data(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Shape(m) => write!(f, "shape error: {m}"),
            Error::Capability(m) => write!(f, "capability exceeded: {m}"),
            Error::Capacity(m) => write!(f, "capacity exceeded: {m}"),
            Error::Certificate(m) => write!(f, "certificate rejected: {m}"),
            Error::Data(m) => write!(f, "data record rejected: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

/// Shorthand constructors, used pervasively.
impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
    pub fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub fn certificate(msg: impl Into<String>) -> Self {
        Error::Certificate(msg.into())
    }
    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}
