use thiserror::Error;

use crate::properties::VerificationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree must be at least 1, got {0}")]
    InvalidDegree(usize),

    #[error("beta must be finite and nonnegative, got {0}")]
    InvalidBeta(f64),

    #[error("point ({0}, {1}) is outside the simplex")]
    OutsideSimplex(f64, f64),

    #[error("value {0} is outside [0, 1]")]
    OutsideInterval(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid function descriptor `{input}`: {reason}")]
    InvalidDescriptor { input: String, reason: String },

    #[error("points are not ordered componentwise: x = ({0}, {1}), y = ({2}, {3})")]
    NotOrdered(f64, f64, f64, f64),

    #[error("direct evaluation overflowed; use the log-space path")]
    Overflow,

    #[error("parameters outside the oracle's safe range: {0}")]
    OracleRange(String),

    #[error("precondition failed for `{}`: input is not in the assumed class", .0.check)]
    Precondition(Box<VerificationReport>),
}
