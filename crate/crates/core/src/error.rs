use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("variable {0} is not in the variable list")]
    UnknownVariable(String),
    #[error("polynomial is not univariate: {0}")]
    NotUnivariate(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("modulus has non-constant leading coefficient in {0}")]
    NonConstantLeading(String),
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("root finding did not converge: {0}")]
    RootsFailed(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid word {word:?}: {msg}")]
    InvalidWord { word: String, msg: String },
    #[error("trace recursion exceeded depth {0}")]
    DepthExceeded(usize),
    #[error("invalid knot data: {0}")]
    InvalidKnot(String),
    #[error("relator defines no curve: {0}")]
    NoCurve(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("path passes within {distance:.3e} of a branch point at t = {t:.6}")]
    NearBranchPoint { t: f64, distance: f64 },
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
