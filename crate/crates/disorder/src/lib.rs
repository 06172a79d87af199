//! Cavity-frequency disorder in SSH chains of microwave resonators:
//! Monte-Carlo statistics of the spectrum and of the edge-state
//! hybridization factor, and inversion of a measured hybridization factor
//! to a disorder strength.

pub mod ensemble;
pub mod error;
pub mod hybridization;
pub mod invert;

pub use ensemble::{percentile, run_ensemble, EnsembleResult, SigmaPoint, FAILURE_BUDGET};
pub use error::{DisorderError, Result};
pub use hybridization::hybridization_factor;
pub use invert::{invert_zeta, SigmaInterval};
