use thiserror::Error;

/// Errors raised by the algebra, systems, series, geometry and numerics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("symbol `{0}` is not assigned")]
    Unassigned(String),
    #[error("denominator numerically zero (|den| = {0:e})")]
    NearZeroDenominator(f64),
    #[error("invalid root rule: {0}")]
    InvalidRule(String),
    #[error("inverse required: {0}")]
    InverseRequired(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("unsupported leading balance: {0}")]
    UnsupportedBalance(String),
    #[error("no Laurent square root: {0}")]
    NoLaurentSqrt(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
