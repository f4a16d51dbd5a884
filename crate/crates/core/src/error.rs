use thiserror::Error;

/// Errors raised by the geometry and assembly routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.6e})")]
    NotPsd(f64),

    #[error("points {0} and {1} coincide")]
    Coincident(usize, usize),

    #[error("data is not realizable: {0}")]
    NotRealizable(String),

    #[error("coherence violation: {0}")]
    Coherence(String),

    /// Two independent numerical routes disagreed outside their tolerance band.
    #[error("numerical disagreement: {0}")]
    Disagreement(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn is_disagreement(&self) -> bool {
        matches!(self, Error::Disagreement(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
