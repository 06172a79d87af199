//! Wavenumber-resolved graphene ribbon chains.
//!
//! A ribbon that is periodic along its axis reduces, at fixed `k_par`, to a
//! generalized SSH chain across its width. Both edge types map onto the
//! Bloch form of [`BlochSeries`]:
//!
//! ```text
//! zig-zag:   ρ(k⊥|k∥) = J_a + J_b e^{-ik∥} + J_c e^{-ik⊥}
//! armchair:  ρ(k⊥|k∥) = J_c + J_b e^{-ik⊥} + J_a e^{-ik∥} e^{+ik⊥}
//! ```
//!
//! For a strained lattice with one strong bond family `J` and two weak ones
//! `J′` the four orientations assign
//!
//! | orientation       | chain    | J_a | J_b | J_c |
//! |-------------------|----------|-----|-----|-----|
//! | `ZigZag`          | zig-zag  | J′  | J′  | J   |
//! | `Armchair`        | armchair | J′  | J′  | J   |
//! | `TiltedZigZag`    | zig-zag  | J   | J′  | J′  |
//! | `TiltedArmchair`  | armchair | J   | J′  | J′  |

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochSeries;
use crate::error::{LatticeError, Result};
use crate::hamiltonian::BlochHamiltonian;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RibbonOrientation {
    ZigZag,
    Armchair,
    TiltedZigZag,
    TiltedArmchair,
}

impl RibbonOrientation {
    pub const ALL: [RibbonOrientation; 4] = [
        RibbonOrientation::ZigZag,
        RibbonOrientation::Armchair,
        RibbonOrientation::TiltedZigZag,
        RibbonOrientation::TiltedArmchair,
    ];

    /// Whether the ribbon edge is of zig-zag type.
    pub fn is_zigzag(self) -> bool {
        matches!(self, Self::ZigZag | Self::TiltedZigZag)
    }

    /// `(J_a, J_b, J_c)` for strong coupling `j` and weak coupling `jp`.
    pub fn bond_couplings(self, c: &RibbonCouplings) -> (f64, f64, f64) {
        match self {
            Self::ZigZag | Self::Armchair => (c.jp, c.jp, c.j),
            Self::TiltedZigZag | Self::TiltedArmchair => (c.j, c.jp, c.jp),
        }
    }

    /// Bloch series of the chain across the ribbon at fixed `k_par`.
    pub fn bloch_series(self, k_par: f64, c: &RibbonCouplings) -> BlochSeries {
        let (ja, jb, jc) = self.bond_couplings(c);
        let phase = Complex64::from_polar(1.0, -k_par);
        if self.is_zigzag() {
            BlochSeries::new([(0, ja + jb * phase), (1, Complex64::new(jc, 0.0))])
        } else {
            BlochSeries::new([
                (0, Complex64::new(jc, 0.0)),
                (1, Complex64::new(jb, 0.0)),
                (-1, ja * phase),
            ])
        }
    }
}

impl std::str::FromStr for RibbonOrientation {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_', ' '], "").as_str() {
            "zigzag" => Ok(Self::ZigZag),
            "armchair" => Ok(Self::Armchair),
            "tiltedzigzag" => Ok(Self::TiltedZigZag),
            "tiltedarmchair" => Ok(Self::TiltedArmchair),
            _ => Err(LatticeError::InvalidParameter(format!(
                "unknown ribbon orientation '{s}'"
            ))),
        }
    }
}

/// Strong (`j`) and weak (`jp`) bond couplings of a strained ribbon, in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RibbonCouplings {
    pub j: f64,
    pub jp: f64,
}

impl RibbonCouplings {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("J", self.j), ("J'", self.jp)] {
            if !value.is_finite() {
                return Err(LatticeError::InvalidParameter(format!(
                    "coupling {name} is not finite"
                )));
            }
            if value < 0.0 {
                return Err(LatticeError::NegativeCoupling { name, value });
            }
        }
        Ok(())
    }
}

/// Hamiltonian of the ribbon chain of `width` cells at wavenumber `k_par`.
///
/// Energies are relative to the cavity frequency. Sites are ordered
/// A1, B1, …, A_width, B_width across the ribbon.
pub fn build_ribbon_hamiltonian(
    orientation: RibbonOrientation,
    width: usize,
    k_par: f64,
    couplings: &RibbonCouplings,
) -> Result<BlochHamiltonian> {
    if width < 1 {
        return Err(LatticeError::InvalidParameter(
            "ribbon width must be at least 1".into(),
        ));
    }
    if !(-PI - 1e-12..=PI + 1e-12).contains(&k_par) {
        return Err(LatticeError::InvalidParameter(format!(
            "k_par = {k_par} outside [-π, π]"
        )));
    }
    couplings.validate()?;
    let m = orientation
        .bloch_series(k_par, couplings)
        .finite_chain(width);
    let labels = (1..=width)
        .flat_map(|n| [format!("A{n}"), format!("B{n}")])
        .collect();
    BlochHamiltonian::new(m, labels, k_par)
}
