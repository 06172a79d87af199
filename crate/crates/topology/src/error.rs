use thiserror::Error;

pub type Result<T> = std::result::Result<T, TopologyError>;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("undefined winding: the bulk curve touches the origin (min |ρ| = {min_abs:e}, max |ρ| = {max_abs:e})")]
    Gapless { min_abs: f64, max_abs: f64 },

    #[error("winding number {winding} is outside the two-band model (only 0 and ±1 are in scope)")]
    OutOfModel { winding: i64 },

    #[error("Zak phase {value} is not within 1e-3·π of 0 or π")]
    NotQuantized { value: f64 },

    #[error("phase unwrapping did not resolve the curve with {samples} samples")]
    Undersampled { samples: usize },

    #[error("invalid bulk curve: {0}")]
    InvalidCurve(String),

    #[error(transparent)]
    Lattice(#[from] omlat_core::LatticeError),
}
