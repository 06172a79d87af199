//! Bulk-boundary analysis for two-band chains.
//!
//! Every model handled here has a bulk Hamiltonian of the form
//! `[[0, ρ(k)], [ρ*(k), 0]]` (plus an identity term that does not affect
//! topology), with `ρ(k) = |ρ(k)| e^{-iφ(k)}`. The winding number of `ρ` around
//! the origin, the Zak phase `½∮ ∂_k φ dk`, and the slope `∂_k φ` at the
//! gap minimum together predict whether a finite chain of `N` cells carries a
//! pair of edge states: the Zak phase must be `π` and `|∂_k φ(k_min)| < N + 1`.
//!
//! Energies are in Hz relative to the cavity frequency.

mod curve;
mod error;
pub mod graphene;
mod prediction;
pub mod ssh;

pub use curve::{phase_derivative, BulkCurve, DEFAULT_BZ_SAMPLES, GAP_RTOL};
pub use error::{Result, TopologyError};
pub use graphene::{
    exact_gap, gapless_points, graphene_bulk, graphene_rho, min_gap_bz, GrapheneCouplings,
};
pub use prediction::{
    edge_prediction, edge_prediction_finite, locate_k_min, reference_wavenumber,
    ribbon_edge_prediction, winding_number, zak_phase, EdgePrediction, ZakPhase, MARGINAL_BAND,
};
pub use ssh::{band_table, bulk_bands_ssh, bulk_rho_ssh, BandRow};
