use nalgebra::DMatrix;

use crate::error::{LatticeError, Result};
use crate::modes::ModeSet;

/// Default tolerance on row and column sums.
pub const STOCHASTIC_TOL: f64 = 1e-10;

/// Energy participation ratios `η_i^k = |ψ_i^k|²`, mode `k` in row `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticipationMatrix {
    eta: DMatrix<f64>,
}

impl ParticipationMatrix {
    /// Wraps a matrix whose rows and columns each sum to one within `tol`.
    pub fn new(eta: DMatrix<f64>, tol: f64) -> Result<Self> {
        if eta.nrows() != eta.ncols() || eta.nrows() == 0 {
            return Err(LatticeError::InvalidParameter(format!(
                "participation matrix must be square, got {}x{}",
                eta.nrows(),
                eta.ncols()
            )));
        }
        if eta.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(LatticeError::InvalidParameter(
                "participation ratios must be finite and non-negative".into(),
            ));
        }
        let p = Self { eta };
        let dev = p.stochastic_defect();
        if dev > tol {
            return Err(LatticeError::InvalidParameter(format!(
                "participation matrix is not doubly stochastic (max sum deviation {dev:e} > {tol:e})"
            )));
        }
        Ok(p)
    }

    pub fn eta(&self) -> &DMatrix<f64> {
        &self.eta
    }

    pub fn dim(&self) -> usize {
        self.eta.nrows()
    }

    /// `η_i^k` with zero-based mode `k` and site `i`.
    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.eta[(k, i)]
    }

    /// Largest deviation of any row or column sum from one.
    pub fn stochastic_defect(&self) -> f64 {
        stochastic_defect(&self.eta)
    }
}

pub(crate) fn stochastic_defect(eta: &DMatrix<f64>) -> f64 {
    let rows = eta.row_iter().map(|r| (r.sum() - 1.0).abs());
    let cols = eta.column_iter().map(|c| (c.sum() - 1.0).abs());
    rows.chain(cols).fold(0.0, f64::max)
}

/// Squares the modeshape entries.
pub fn participation(m: &ModeSet) -> ParticipationMatrix {
    ParticipationMatrix {
        eta: m.modeshapes().map(|x| x * x),
    }
}
