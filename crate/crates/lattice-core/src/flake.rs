//! The 24-site honeycomb flake (coronene geometry, seven hexagons).
//!
//! Hexagons are pointy-top with unit bond length. Sites are numbered row by
//! row from the top, left to right inside each row:
//!
//! | site | (x, y)          | nearest neighbours (v = vertical bond) |
//! |------|-----------------|----------------------------------------|
//! | 1    | (−√3/2, 2.5)    | 3, 4                                   |
//! | 2    | (+√3/2, 2.5)    | 4, 5                                   |
//! | 3    | (−√3, 2)        | 1, 6v                                  |
//! | 4    | (0, 2)          | 1, 2, 7v                               |
//! | 5    | (+√3, 2)        | 2, 8v                                  |
//! | 6    | (−√3, 1)        | 3v, 9, 10                              |
//! | 7    | (0, 1)          | 4v, 10, 11                             |
//! | 8    | (+√3, 1)        | 5v, 11, 12                             |
//! | 9    | (−3√3/2, 0.5)   | 6, 13v                                 |
//! | 10   | (−√3/2, 0.5)    | 6, 7, 14v                              |
//! | 11   | (+√3/2, 0.5)    | 7, 8, 15v                              |
//! | 12   | (+3√3/2, 0.5)   | 8, 16v                                 |
//! | 13   | (−3√3/2, −0.5)  | 9v, 17                                 |
//! | 14   | (−√3/2, −0.5)   | 10v, 17, 18                            |
//! | 15   | (+√3/2, −0.5)   | 11v, 18, 19                            |
//! | 16   | (+3√3/2, −0.5)  | 12v, 19                                |
//! | 17   | (−√3, −1)       | 13, 14, 20v                            |
//! | 18   | (0, −1)         | 14, 15, 21v                            |
//! | 19   | (+√3, −1)       | 15, 16, 22v                            |
//! | 20   | (−√3, −2)       | 17v, 23                                |
//! | 21   | (0, −2)         | 18v, 23, 24                            |
//! | 22   | (+√3, −2)       | 19v, 24                                |
//! | 23   | (−√3/2, −2.5)   | 20, 21                                 |
//! | 24   | (+√3/2, −2.5)   | 21, 22                                 |
//!
//! Vertical bonds carry `J` and the two slanted orientations carry `J′`, so
//! that the couplings alternate along the vertical axis. Second neighbours
//! (distance √3) carry `J2`. Sites 1, 2, 23 and 24 are the apex sites of the
//! top and bottom zig-zag edges; they have no vertical bond and host the edge
//! modes as `J′/J → 0`.
//!
//! The index map is a convention of this crate. It reads the device image top
//! to bottom and left to right, but the assignment of numbers to physical
//! positions is not taken from any published table.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{LatticeError, Result};
use crate::hamiltonian::CouplingHamiltonian;

pub const FLAKE_SITES: usize = 24;

/// Zero-based indices of the four top/bottom apex sites (sites 1, 2, 23, 24).
pub const EDGE_SITES: [usize; 4] = [0, 1, 22, 23];

/// Couplings of the honeycomb flake, in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FlakeCouplings {
    /// Vertical bonds.
    pub j: f64,
    /// Slanted bonds.
    pub jp: f64,
    /// Second neighbours.
    #[serde(default)]
    pub j2: f64,
}

impl FlakeCouplings {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("J", self.j), ("J'", self.jp), ("J2", self.j2)] {
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

/// Bond classes of the flake graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bond {
    Vertical,
    Slanted,
    SecondNeighbour,
}

/// Site coordinates in units of the bond length, in site order.
pub fn site_positions() -> Vec<(f64, f64)> {
    let s3 = 3f64.sqrt();
    let centers = [
        (0.0, 0.0),
        (s3, 0.0),
        (-s3, 0.0),
        (s3 / 2.0, 1.5),
        (-s3 / 2.0, 1.5),
        (s3 / 2.0, -1.5),
        (-s3 / 2.0, -1.5),
    ];
    let offsets = [
        (0.0, 1.0),
        (0.0, -1.0),
        (s3 / 2.0, 0.5),
        (s3 / 2.0, -0.5),
        (-s3 / 2.0, 0.5),
        (-s3 / 2.0, -0.5),
    ];
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(FLAKE_SITES);
    for (cx, cy) in centers {
        for (dx, dy) in offsets {
            let p = (cx + dx, cy + dy);
            if !pts.iter().any(|q| dist(*q, p) < 1e-9) {
                pts.push(p);
            }
        }
    }
    pts.sort_by(|a, b| {
        let row = b.1.partial_cmp(&a.1).unwrap();
        if (a.1 - b.1).abs() < 1e-9 {
            a.0.partial_cmp(&b.0).unwrap()
        } else {
            row
        }
    });
    pts
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// All bonds `(i, j, class)` with `i < j`, zero-based.
pub fn bonds() -> Vec<(usize, usize, Bond)> {
    let pts = site_positions();
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = dist(pts[i], pts[j]);
            if (d - 1.0).abs() < 1e-9 {
                let class = if (pts[i].0 - pts[j].0).abs() < 1e-9 {
                    Bond::Vertical
                } else {
                    Bond::Slanted
                };
                out.push((i, j, class));
            } else if (d - 3f64.sqrt()).abs() < 1e-9 {
                out.push((i, j, Bond::SecondNeighbour));
            }
        }
    }
    out
}

/// Builds the 24×24 flake Hamiltonian.
pub fn build_honeycomb_flake(
    couplings: &FlakeCouplings,
    cavity_freqs: &[f64],
) -> Result<CouplingHamiltonian> {
    couplings.validate()?;
    if cavity_freqs.len() != FLAKE_SITES {
        return Err(LatticeError::SiteCount {
            expected: FLAKE_SITES,
            got: cavity_freqs.len(),
        });
    }
    let mut m = DMatrix::<f64>::zeros(FLAKE_SITES, FLAKE_SITES);
    for (i, f) in cavity_freqs.iter().enumerate() {
        m[(i, i)] = *f;
    }
    for (i, j, class) in bonds() {
        let v = match class {
            Bond::Vertical => couplings.j,
            Bond::Slanted => couplings.jp,
            Bond::SecondNeighbour => couplings.j2,
        };
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    CouplingHamiltonian::new(m, None)
}
