use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Input data violates a structural precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Two inputs that must agree in shape do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// An index is outside the valid range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    /// Unknown wavelet filter name.
    #[error("unsupported filter `{0}`")]
    UnsupportedFilter(String),
    /// Unknown test signal name.
    #[error("unsupported signal `{0}`")]
    UnsupportedSignal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
