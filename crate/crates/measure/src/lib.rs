//! Simulation of optomechanical modeshape measurements on a lattice of
//! coupled microwave resonators, and recovery of the lattice Hamiltonian
//! from them.
//!
//! Each site carries a mechanical drumhead resonator. Driving collective
//! mode `k` on its red sideband damps the drum at site `i` at a rate
//! proportional to the mode's participation `η_i^k` there. Sweeping the drive
//! power gives unnormalized participations, which are normalized, signed
//! against a theory model, orthogonalized and turned back into a
//! Hamiltonian.

pub mod damping;
pub mod error;
pub mod matfun;
pub mod pipeline;
pub mod recover;
pub mod ringdown;
pub mod sinkhorn;
pub mod thermometry;

pub use damping::{
    damping_slope, intracavity_photons, optomech_damping, unnormalized_eta, DampingConfig,
};
pub use error::{MeasureError, Result};
pub use pipeline::{
    recover, simulate_measurement, DeviceModel, MeasurementDataset, NoiseModel, PointRecord,
    RecoveryResult, Residuals, SweepSettings,
};
pub use recover::{
    anchor_g0, assign_signs, match_modes, orthogonalize, orthogonalize_gauged,
    reconstruct_hamiltonian, relative_g0, ReconstructedHamiltonian,
};
pub use ringdown::{
    fit_ringdown, simulate_ringdown, FitOptions, RingdownFit, RingdownSettings, RingdownTrace,
};
pub use sinkhorn::{
    relative_error, sinkhorn_normalize, sinkhorn_trace, SinkhornOptions, SinkhornResult,
};
pub use thermometry::{
    sideband_ratio, sideband_thermometry, slope_through_origin, ThermometryResult,
};
