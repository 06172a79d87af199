//! Bulk bands of (strained) graphene.
//!
//! Lattice vectors `a₁ = (√3/2, 3/2)` and `a₂ = (−√3/2, 3/2)` in units of the
//! bond length, and `ρ(k) = J_c + J_a e^{-i a₁·k} + J_b e^{-i a₂·k}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrapheneCouplings {
    pub ja: f64,
    pub jb: f64,
    pub jc: f64,
}

impl GrapheneCouplings {
    /// Strained lattice with one strong bond family: `J_c = j`, `J_a = J_b = jp`.
    /// The gap opens for `jp/j < 1/2`.
    pub fn strained(j: f64, jp: f64) -> Self {
        Self {
            ja: jp,
            jb: jp,
            jc: j,
        }
    }

    fn rho_phases(&self, t1: f64, t2: f64) -> Complex64 {
        self.jc
            + self.ja * Complex64::from_polar(1.0, -t1)
            + self.jb * Complex64::from_polar(1.0, -t2)
    }
}

const A1: [f64; 2] = [0.866_025_403_784_438_6, 1.5];
const A2: [f64; 2] = [-0.866_025_403_784_438_6, 1.5];

pub fn graphene_rho(k: [f64; 2], c: &GrapheneCouplings) -> Complex64 {
    let t1 = A1[0] * k[0] + A1[1] * k[1];
    let t2 = A2[0] * k[0] + A2[1] * k[1];
    c.rho_phases(t1, t2)
}

/// `(E₋, E₊) = ∓|ρ(k)|`.
pub fn graphene_bulk(k: [f64; 2], c: &GrapheneCouplings) -> (f64, f64) {
    let r = graphene_rho(k, c).norm();
    (-r, r)
}

/// Smallest direct gap `E₊ − E₋ = 2|ρ|` over an `n × n` grid of the zone.
///
/// The grid is uniform in the reciprocal basis, `k = u·b₁ + v·b₂` with
/// `u, v ∈ {0, 1/n, …}`, so `a₁·k = 2πu` and `a₂·k = 2πv`. Points such as the
/// isotropic Dirac points at `(u, v) = (1/3, 2/3)` are on the grid only when `n`
/// is a multiple of 3.
pub fn min_gap_bz(c: &GrapheneCouplings, n: usize) -> f64 {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let t1 = 2.0 * PI * i as f64 / n as f64;
            (0..n)
                .map(|j| {
                    let t2 = 2.0 * PI * j as f64 / n as f64;
                    c.rho_phases(t1, t2).norm()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
        * 2.0
}

/// Exact bulk gap `2·min_k |ρ(k)|`. The two Bloch phases are independent,
/// so `ρ` is a sum of three vectors of fixed lengths and free directions:
/// the smallest resultant is `max(0, 2·max J − ΣJ)`. The gap closes when
/// the couplings satisfy the triangle inequality.
pub fn exact_gap(c: &GrapheneCouplings) -> f64 {
    let (a, b, cc) = (c.ja.abs(), c.jb.abs(), c.jc.abs());
    let largest = a.max(b).max(cc);
    2.0 * (2.0 * largest - (a + b + cc)).max(0.0)
}

/// Grid points `(i, j)` of the `n × n` zone grid with `|ρ| ≤ tol`.
pub fn gapless_points(c: &GrapheneCouplings, n: usize, tol: f64) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let t1 = 2.0 * PI * i as f64 / n as f64;
            (0..n).filter_map(move |j| {
                let t2 = 2.0 * PI * j as f64 / n as f64;
                (c.rho_phases(t1, t2).norm() <= tol).then_some((i, j))
            })
        })
        .collect();
    out.sort_unstable();
    out
}
