use thiserror::Error;

/// Errors raised by the library.
///
/// `InvalidInput` covers precondition failures on caller-supplied values.
/// `Invariant` means an internal consistency check failed; it always
/// indicates a bug (or an unsupported input that slipped past validation).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => { $crate::error::Error::InvalidInput(format!($($arg)*)) };
}

macro_rules! invariant {
    ($($arg:tt)*) => { $crate::error::Error::Invariant(format!($($arg)*)) };
}

pub(crate) use invalid;
pub(crate) use invariant;
