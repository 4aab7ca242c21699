use thiserror::Error;

/// Errors raised by the numerical kernels and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("enumeration refused: length {k} exceeds the limit {limit}")]
    EnumerationLimit { k: usize, limit: usize },

    #[error("series did not converge within {terms} terms ({what})")]
    NonConvergence { what: &'static str, terms: usize },

    #[error("pole: lower parameter b = {0} is a non-positive integer")]
    Pole(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("quadrature failed to reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("evaluation point {0} coincides with a quadrature node")]
    SingularNode(f64),

    #[error("evaluation paths disagree: {what} differs by {residual:e} (tol {tol:e})")]
    PathDisagreement {
        what: String,
        residual: f64,
        tol: f64,
    },

    #[error("identity failed [{module}] {identity}: residual {residual:e}")]
    CheckFailed {
        module: &'static str,
        identity: String,
        residual: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
