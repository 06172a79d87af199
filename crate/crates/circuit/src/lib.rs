//! Circuit-theory relations for lattices of inductively coupled LC resonators.
//!
//! Frequencies are ordinary frequencies in Hz, inductances in H, capacitances
//! in F and lengths in m.

mod band;
mod drumhead;
mod error;
mod neumann;
mod wire;

pub use band::{
    coupling_rate, dimer_eigenfrequencies, infinite_chain_band, mutual_for_coupling,
    passband_edges, CircuitCell, Passbands,
};
pub use drumhead::{
    drumhead_frequency, fit_drumhead_radii, stress_density_ratio, DrumheadFit, DRUMHEAD_MODE_FACTOR,
};
pub use error::{CircuitError, Result};
pub use neumann::{mutual_inductance_neumann, MU0};
pub use wire::WireCurve;
