//! Error taxonomy shared by every module in the crate.

use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the analysis toolkit.
///
/// `Shape`, `Precondition`, `Structure`, `Limit` and `Parse` are caller
/// errors; `Numerical` and `EigenNonConvergence` signal that an algorithm
/// gave up at working precision. The CLI maps the former to exit code 2 and
/// the latter to exit code 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("limit exceeded: {0}")]
    Limit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// QR iteration ran out of sweeps. `partial` carries the eigenvalues
    /// that had already deflated plus the current diagonal.
    #[error("eigensolver did not converge within {iterations} sweeps ({deflated}/{size} eigenvalues deflated)")]
    EigenNonConvergence {
        iterations: usize,
        deflated: usize,
        size: usize,
        partial: Vec<Complex64>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors triggered by bad input rather than by numerics.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::Shape(_)
                | Error::Precondition(_)
                | Error::Structure(_)
                | Error::Limit(_)
                | Error::Parse(_)
                | Error::Io(_)
        )
    }
}
