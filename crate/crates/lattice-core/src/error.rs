use thiserror::Error;

pub type Result<T> = std::result::Result<T, LatticeError>;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("coupling {name} is negative ({value} Hz)")]
    NegativeCoupling { name: &'static str, value: f64 },

    #[error("expected {expected} cavity frequencies, got {got}")]
    SiteCount { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not Hermitian: |H[{row}][{col}] - conj(H[{col}][{row}])| = {deviation:e} (max |H| = {scale:e})")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
        scale: f64,
    },

    #[error("eigensolver did not converge for a {dim}x{dim} matrix (max |H| = {scale:e}, residual {residual:e})")]
    NoConvergence {
        dim: usize,
        scale: f64,
        residual: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
