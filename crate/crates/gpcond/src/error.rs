use std::fmt;

/// Errors produced by the library.
#[derive(Debug)]
pub enum GpError {
    /// A caller-supplied value violates a precondition.
    InvalidArgument(String),
    /// A matrix that must be positive semi-definite has an eigenvalue
    /// below the accepted round-off tolerance.
    NotPsd { min_eigenvalue: f64, tolerance: f64 },
    /// Cholesky factorization hit a non-positive pivot.
    NotSpd(String),
    /// An iterative routine failed to converge.
    NumericalFailure(String),
    /// The requested observation functional is not defined for the
    /// given kernel or mean function (e.g. derivatives of a
    /// non-differentiable kernel).
    UnsupportedFunctional(String),
    /// An operation was called on a state it is not defined for.
    InvalidUsage(String),
    /// Configuration text could not be parsed; `line` is 1-based.
    Config { line: usize, message: String },
    Io(std::io::Error),
}

impl fmt::Display for GpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GpError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            GpError::NotPsd {
                min_eigenvalue,
                tolerance,
            } => write!(
                f,
                "matrix is not positive semi-definite: eigenvalue {min_eigenvalue:e} below -{tolerance:e}"
            ),
            GpError::NotSpd(msg) => write!(f, "matrix is not positive definite: {msg}"),
            GpError::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
            GpError::UnsupportedFunctional(msg) => write!(f, "unsupported functional: {msg}"),
            GpError::InvalidUsage(msg) => write!(f, "invalid usage: {msg}"),
            GpError::Config { line, message } => write!(f, "config line {line}: {message}"),
            GpError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for GpError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            GpError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for GpError {
    fn from(e: std::io::Error) -> Self {
        GpError::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, GpError>;
