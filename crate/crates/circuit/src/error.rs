use thiserror::Error;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("invalid circuit parameter: {0}")]
    InvalidParameter(String),
    #[error("mutual inductance |M| = {m:e} H is not below L = {l:e} H")]
    NonPhysicalCoupling { m: f64, l: f64 },
    #[error("invalid wire curve: {0}")]
    InvalidCurve(String),
    #[error(
        "curves pass within {distance:e} m of each other with segments of {segment:e} m; \
         self-inductance and touching conductors are out of scope"
    )]
    CurvesTooClose { distance: f64, segment: f64 },
    #[error("fit failed: {0}")]
    Fit(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CircuitError>;
