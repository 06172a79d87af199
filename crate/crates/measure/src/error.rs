use omlat_core::LatticeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("ringdown fit did not converge after {iterations} iterations (relative step {step:e}, rss {rss:e})")]
    FitNotConverged {
        iterations: usize,
        step: f64,
        rss: f64,
    },
    #[error(
        "normalization did not converge after {iterations} iterations (residual {residual:e})"
    )]
    SinkhornNotConverged { iterations: usize, residual: f64 },
    #[error(
        "matrix has eigenvalue {re:+.3e}{im:+.3e}i on or near the branch cut of the logarithm; \
         report the unorthogonalized modeshapes instead"
    )]
    BranchCut { re: f64, im: f64 },
    #[error("matrix is singular or ill-conditioned: {0}; report the unorthogonalized modeshapes instead")]
    Singular(String),
    #[error("matrix is not orthogonal (max |UUᵀ - I| = {defect:e})")]
    NotOrthogonal { defect: f64 },
    #[error("fitted slope {0:e} is not positive")]
    NonPositiveSlope(f64),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, MeasureError>;
