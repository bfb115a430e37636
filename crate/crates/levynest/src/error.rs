use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum LevyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite argument: {0}")]
    NonFinite(String),

    #[error("quadrature did not converge (achieved error {achieved:.3e}, target {target:.3e})")]
    Quadrature { achieved: f64, target: f64 },

    #[error("measure is not representable in radial form: {0}")]
    NotRepresentable(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("infinite moment: {0}")]
    InfiniteMoment(String),

    #[error("law is not mean-zero (|mean| = {0:.3e})")]
    NotMeanZero(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LevyError {
    /// True for failures of the numerics rather than of the mathematics.
    pub fn is_numerical(&self) -> bool {
        matches!(self, LevyError::Quadrature { .. } | LevyError::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, LevyError>;
