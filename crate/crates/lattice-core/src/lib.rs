//! Lattice Hamiltonians for arrays of inductively coupled LC resonators.
//!
//! Every frequency in this crate is an ordinary frequency `ν = ω/2π` in Hz.
//! A coupling quoted as `J/2π = 470 MHz` is stored as `470e6`. Nothing in the
//! crate multiplies by `2π`; callers that need angular rates convert at their
//! own boundary.
//!
//! The crate covers three lattice families:
//!
//! * finite SSH chains with optional second- and third-neighbour couplings,
//!   see [`build_ssh_chain`];
//! * the 24-site honeycomb flake, see [`build_honeycomb_flake`] and the site
//!   map in [`flake`];
//! * wavenumber-resolved graphene ribbon unit cells, see
//!   [`build_ribbon_hamiltonian`].
//!
//! Real symmetric matrices go through [`diagonalize`]; the complex Bloch
//! matrices of ribbons go through [`diagonalize_bloch`].

pub mod bloch;
pub mod disorder;
mod error;
pub mod flake;
mod hamiltonian;
pub mod io;
mod modes;
mod participation;
pub mod ribbon;
pub mod spec;
mod ssh;

pub use bloch::BlochSeries;
pub use disorder::{apply_disorder, derive_seed};
pub use error::{LatticeError, Result};
pub use flake::{build_honeycomb_flake, FlakeCouplings, EDGE_SITES, FLAKE_SITES};
pub use hamiltonian::{BlochHamiltonian, CouplingHamiltonian};
pub use modes::{
    bloch_eigenvalues, diagonalize, diagonalize_bloch, orthogonality_defect, BlochModes, ModeSet,
};
pub use participation::{participation, ParticipationMatrix, STOCHASTIC_TOL};
pub use ribbon::{build_ribbon_hamiltonian, RibbonCouplings, RibbonOrientation};
pub use spec::{CouplingParams, LatticeSection, LatticeSpec, SiteParams, TopologyKind};
pub use ssh::{build_ssh_chain, SshCouplings};

/// Re-exported so downstream crates name the same complex type.
pub use num_complex::Complex64;
