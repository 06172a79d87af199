use omlat_core::LatticeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DisorderError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{failed} of {total} samples failed to diagonalize, above the 0.1% budget")]
    TooManyFailures { failed: usize, total: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, DisorderError>;
