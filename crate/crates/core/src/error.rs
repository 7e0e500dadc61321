use thiserror::Error;

/// Errors raised by the numeric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Overflow, NaN, or a singular factorization.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("iteration did not converge: {0}")]
    NotConverged(String),

    /// The Riccati equation has no stabilizing solution (or the pair is not stabilizable).
    #[error("no stabilizing solution: {0}")]
    NotStabilizing(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
