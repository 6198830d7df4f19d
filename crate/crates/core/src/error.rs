use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("vectors are linearly dependent (normalized Gram determinant {gram_det:.3e})")]
    Dependent { gram_det: f64 },

    #[error("vector lies outside the fitted span (relative residual {residual:.3e})")]
    OutsideSpan { residual: f64 },

    #[error("Hilbert norm fit failed: distortion {distortion:.6} exceeds {limit:.6}")]
    HilbertFit { distortion: f64, limit: f64 },

    #[error("precondition `{what}` violated: {detail}")]
    Precondition { what: &'static str, detail: String },

    #[error("hypothesis not met: measured SPR ratio {measured} does not exceed required {required:.6e}")]
    RatioHypothesis { required: f64, measured: String },

    #[error("assertion `{what}` failed: {lhs:.12e} vs {rhs:.12e}")]
    Assertion {
        what: &'static str,
        lhs: f64,
        rhs: f64,
    },

    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}

/// Fails with [`Error::Assertion`] unless `lhs <= rhs`.
pub(crate) fn ensure_le(what: &'static str, lhs: f64, rhs: f64) -> Result<()> {
    if lhs <= rhs {
        Ok(())
    } else {
        Err(Error::Assertion { what, lhs, rhs })
    }
}
