use thiserror::Error;

use crate::scalars::Inadmissible;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("{0}")]
    Inadmissible(Inadmissible),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("leg out of range: {0}")]
    LegRange(String),
    #[error("operator is singular")]
    Singular,
    #[error("operator is not skew invertible")]
    NotSkewInvertible,
    #[error("not of BMW type: {0}")]
    NotBmwType(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("spectral pole at x = {0}")]
    SpectralPole(String),
    #[error("incompatible pair: {0}")]
    NotCompatible(String),
    #[error("F is not strict skew invertible")]
    FNotStrict,
    #[error("recursion variants disagree: {0}")]
    RecursionMismatch(String),
    #[error("degree {0} exceeds the reducer's maximal degree {1}")]
    DegreeOverflow(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<Inadmissible> for Error {
    fn from(v: Inadmissible) -> Self {
        Error::Inadmissible(v)
    }
}
