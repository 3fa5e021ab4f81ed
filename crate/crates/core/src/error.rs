//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFiniteEntry,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("operator is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("trace deviates from one by {deviation:.3e} (admissible {tol:.3e})")]
    TraceDeviationTooLarge { deviation: f64, tol: f64 },

    #[error("dimension {dim} unsupported: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("order {order} unsupported: {reason}")]
    UnsupportedOrder { order: usize, reason: &'static str },

    #[error("trace in {context} has imaginary residue {residue:.3e}")]
    ImaginaryResidue { context: &'static str, residue: f64 },

    #[error("dual evaluations of {context} disagree by {delta:.3e}")]
    Inconsistent { context: &'static str, delta: f64 },

    #[error("moment mu_{index} missing from table")]
    MissingMoment { index: usize },

    #[error("Gram system degenerate at order {order}")]
    DegenerateGram { order: usize },

    #[error("Fisher information vanishes (mu_2 = {mu2:.3e}); time is not identifiable")]
    ZeroFisherInformation { mu2: f64 },

    #[error("spec error at `{path}`: {reason}")]
    Schema { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    ///
    /// 2 signals a malformed problem document, 3 a numerical degeneracy that
    /// prevents the requested bound order, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Schema { .. } => 2,
            Error::DegenerateGram { .. } | Error::ZeroFisherInformation { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
