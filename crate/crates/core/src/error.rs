use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::QuadratureResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("pole sequence is empty")]
    EmptySequence,

    #[error("poles at indices {indices:?} are not in the declared half-plane")]
    WrongHalfPlane { indices: Vec<usize> },

    #[error("prefix of length {requested} requested but only {available} poles are available")]
    PrefixTooShort { requested: usize, available: usize },

    #[error("evaluation point {z} coincides with pole {pole}")]
    PoleHit { z: Complex64, pole: Complex64 },

    #[error("basis index {index} is outside the available range {min}..={max}")]
    IndexOutOfRange { index: i64, min: i64, max: i64 },

    #[error("degenerate arguments: {0}")]
    DegenerateArguments(&'static str),

    #[error("interval width y must be nonzero")]
    ZeroWidth,

    #[error("tolerance not met within {budget} evaluations (achieved {achieved:e})", achieved = .partial.abs_error_estimate)]
    ToleranceNotMet {
        budget: usize,
        partial: QuadratureResult,
    },

    #[error("exponent p = {0} must exceed 1")]
    InvalidExponent(f64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
