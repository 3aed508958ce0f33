use alloc::string::String;
use core::fmt;

/// Errors from validation of inputs and parameters.
///
/// Numeric routines in this crate do not fail once their inputs pass
/// validation; every fallible path is a precondition check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Dyadic-length requirement violated. Wavelet and scattering transforms
    /// operate on lengths 2^J; callers pad first (see `dwt::pad_signal`).
    NonPowerOfTwo { len: usize },
    /// Two related inputs disagree in shape (lengths, row counts, group
    /// coverage).
    Shape(String),
    /// A parameter is outside its valid range.
    Param(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPowerOfTwo { len } => write!(
                f,
                "input length {len} is not a power of two; pad to a dyadic length first"
            ),
            Error::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            Error::Param(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
