use std::path::PathBuf;

use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is singular at pivot {pivot} (|pivot| = {magnitude:e}); shift {shift} may be an exact eigenvalue")]
    Singular {
        pivot: usize,
        magnitude: f64,
        shift: Complex64,
    },

    #[error("problem size {required} exceeds the configured budget of {budget}")]
    BudgetExceeded { required: usize, budget: usize },

    #[error("dense eigensolver failed to converge on a {0}x{0} matrix")]
    NoConvergence(usize),

    #[error("parse error in {path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
