use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("context error: {0}")]
    Context(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("substitution error: {0}")]
    Substitution(String),
    #[error("series has no inverse: constant coefficient is zero")]
    NotAUnit,
    #[error("composition error: inner series has nonzero constant term")]
    Composition,
    #[error("cannot differentiate a series of order 0")]
    EmptyOrder,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("valuation error: {0}")]
    Valuation(String),
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error("invalid birational map: {0}")]
    InvalidMap(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("no rational function within degree bounds ({num}, {den}) matches the series")]
    Reconstruction { num: usize, den: usize },
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}
