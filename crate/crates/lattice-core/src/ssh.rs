use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochSeries;
use crate::error::{LatticeError, Result};
use crate::hamiltonian::CouplingHamiltonian;

/// Couplings of a 1D SSH chain, in Hz.
///
/// Sites are numbered A1, B1, A2, B2, … and the bonds are
///
/// | coupling | bond            |
/// |----------|-----------------|
/// | `j`      | A_n – B_n       |
/// | `jp`     | B_n – A_{n+1}   |
/// | `j2`     | site i – site i+2 (same sublattice) |
/// | `j3`     | A_n – B_{n+1}   |
/// | `j3p`    | B_n – A_{n+2}   |
///
/// so the bulk off-diagonal element is `ρ(k) = J + J′e^{-ik} + J3 e^{ik} + J3′e^{-2ik}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SshCouplings {
    pub j: f64,
    pub jp: f64,
    #[serde(default)]
    pub j2: f64,
    #[serde(default)]
    pub j3: f64,
    #[serde(default)]
    pub j3p: f64,
}

impl SshCouplings {
    /// Nearest-neighbour only.
    pub fn nearest(j: f64, jp: f64) -> Self {
        Self {
            j,
            jp,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("J", self.j),
            ("J'", self.jp),
            ("J2", self.j2),
            ("J3", self.j3),
            ("J3'", self.j3p),
        ] {
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

    /// Bulk off-diagonal element as a Bloch series.
    pub fn bloch_series(&self) -> BlochSeries {
        BlochSeries::real([(0, self.j), (1, self.jp), (-1, self.j3), (2, self.j3p)])
    }
}

/// Builds the `2·n_cells` square Hamiltonian of an open SSH chain.
pub fn build_ssh_chain(
    n_cells: usize,
    couplings: &SshCouplings,
    cavity_freqs: &[f64],
) -> Result<CouplingHamiltonian> {
    if n_cells == 0 {
        return Err(LatticeError::InvalidParameter(
            "n_cells must be at least 1".into(),
        ));
    }
    couplings.validate()?;
    let n = 2 * n_cells;
    if cavity_freqs.len() != n {
        return Err(LatticeError::SiteCount {
            expected: n,
            got: cavity_freqs.len(),
        });
    }
    if let Some(f) = cavity_freqs.iter().find(|f| !f.is_finite()) {
        return Err(LatticeError::InvalidParameter(format!(
            "cavity frequency {f} is not finite"
        )));
    }

    let mut m = DMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_column_slice(cavity_freqs));
    let mut set = |i: usize, j: usize, v: f64| {
        if j < n && v != 0.0 {
            m[(i, j)] += v;
            m[(j, i)] += v;
        }
    };
    for cell in 0..n_cells {
        let a = 2 * cell;
        let b = a + 1;
        set(a, b, couplings.j);
        set(b, b + 1, couplings.jp);
        set(a, b + 2, couplings.j3);
        set(b, a + 4, couplings.j3p);
    }
    for i in 0..n {
        set(i, i + 2, couplings.j2);
    }
    CouplingHamiltonian::new(m, None)
}
