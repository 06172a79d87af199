//! Off-diagonal Bloch element of a two-sublattice chain.
//!
//! A chain with sublattices A and B whose only couplings are A↔B is fully
//! described by the coefficients `c_d` in
//!
//! ```text
//! H[A_n][B_{n-d}] = c_d        ρ(k) = Σ_d c_d · e^{-i d k}
//! ```
//!
//! The SSH chain with parasitics and every ribbon orientation are instances of
//! this form, which is what lets one finite-chain builder and one set of
//! topological routines serve all of them.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Coefficients `c_d` of `ρ(k) = Σ_d c_d e^{-idk}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochSeries {
    terms: Vec<(i32, Complex64)>,
}

impl BlochSeries {
    /// Terms with the same cell offset are summed.
    pub fn new(terms: impl IntoIterator<Item = (i32, Complex64)>) -> Self {
        let mut merged: Vec<(i32, Complex64)> = Vec::new();
        for (d, c) in terms {
            match merged.iter_mut().find(|(e, _)| *e == d) {
                Some((_, acc)) => *acc += c,
                None => merged.push((d, c)),
            }
        }
        merged.sort_by_key(|(d, _)| *d);
        Self { terms: merged }
    }

    /// Real coefficients.
    pub fn real(terms: impl IntoIterator<Item = (i32, f64)>) -> Self {
        Self::new(terms.into_iter().map(|(d, c)| (d, Complex64::new(c, 0.0))))
    }

    pub fn terms(&self) -> &[(i32, Complex64)] {
        &self.terms
    }

    /// Coefficient at offset `d` (zero when absent).
    pub fn coeff(&self, d: i32) -> Complex64 {
        self.terms
            .iter()
            .find(|(e, _)| *e == d)
            .map(|(_, c)| *c)
            .unwrap_or_default()
    }

    /// `ρ(k)`.
    pub fn rho(&self, k: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(d, c)| c * Complex64::from_polar(1.0, -(*d as f64) * k))
            .sum()
    }

    /// `dρ/dk`.
    pub fn rho_prime(&self, k: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(d, c)| {
                let d = *d as f64;
                c * Complex64::new(0.0, -d) * Complex64::from_polar(1.0, -d * k)
            })
            .sum()
    }

    /// Open chain of `n_cells` two-site cells, sites ordered A1, B1, A2, B2, …,
    /// with `H[A_n][B_{n-d}] = c_d` and the Hermitian conjugate below. Terms
    /// that would reach outside the chain are dropped.
    pub fn finite_chain(&self, n_cells: usize) -> DMatrix<Complex64> {
        let n = 2 * n_cells;
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for cell in 0..n_cells as i64 {
            for (d, c) in &self.terms {
                let other = cell - *d as i64;
                if other < 0 || other >= n_cells as i64 {
                    continue;
                }
                let a = 2 * cell as usize;
                let b = 2 * other as usize + 1;
                m[(a, b)] += c;
                m[(b, a)] += c.conj();
            }
        }
        m
    }

    /// Largest coefficient modulus, used as the natural energy scale.
    pub fn scale(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }
}
