//! Alternating row and column normalization of unnormalized participation
//! ratios.

use nalgebra::DMatrix;
use omlat_core::ParticipationMatrix;

use crate::error::{MeasureError, Result};

/// Stopping rule and zero handling for [`sinkhorn_normalize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornOptions {
    /// Largest accepted deviation of any row or column sum from one.
    pub tol: f64,
    pub max_iter: usize,
    /// Entries below this value are raised to it before iterating.
    pub floor: f64,
}

impl Default for SinkhornOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            floor: 1e-15,
        }
    }
}

/// Output of [`sinkhorn_normalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornResult {
    pub eta: ParticipationMatrix,
    /// Normalization steps performed. Each step is either a row or a column
    /// pass.
    pub iterations: usize,
    /// Final largest row or column sum deviation.
    pub residual: f64,
    /// `(mode, site)` entries that were raised to the floor.
    pub floored: Vec<(usize, usize)>,
}

/// Normalizes `η̃` (mode `k` in row `k`, site `i` in column `i`) to a doubly
/// stochastic matrix.
///
/// Even steps divide each entry by its row sum `Σ_i η̃_i^k`, odd steps by its
/// column sum `Σ_k η̃_i^k`. Iteration stops once every row and column sum is
/// within `tol` of one.
pub fn sinkhorn_normalize(
    eta_tilde: &DMatrix<f64>,
    opts: &SinkhornOptions,
) -> Result<SinkhornResult> {
    sinkhorn_trace(eta_tilde, opts, |_, _| ())
}

/// Same as [`sinkhorn_normalize`], calling `observe(step, matrix)` after
/// every normalization step.
pub fn sinkhorn_trace(
    eta_tilde: &DMatrix<f64>,
    opts: &SinkhornOptions,
    mut observe: impl FnMut(usize, &DMatrix<f64>),
) -> Result<SinkhornResult> {
    let n = eta_tilde.nrows();
    if n == 0 || eta_tilde.ncols() != n {
        return Err(MeasureError::ShapeMismatch(format!(
            "expected a non-empty square matrix, got {}x{}",
            n,
            eta_tilde.ncols()
        )));
    }
    if eta_tilde.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(MeasureError::InvalidParameter(
            "unnormalized participation ratios must be finite and non-negative".into(),
        ));
    }
    let mut floored = Vec::new();
    let mut m = eta_tilde.clone();
    for k in 0..n {
        for i in 0..n {
            if m[(k, i)] < opts.floor {
                m[(k, i)] = opts.floor;
                floored.push((k, i));
            }
        }
    }

    let mut residual = f64::INFINITY;
    for step in 0..opts.max_iter {
        if step % 2 == 0 {
            for mut row in m.row_iter_mut() {
                let s = row.sum();
                row /= s;
            }
        } else {
            for mut col in m.column_iter_mut() {
                let s = col.sum();
                col /= s;
            }
        }
        observe(step + 1, &m);
        residual = sum_defect(&m);
        if residual < opts.tol {
            let eta = ParticipationMatrix::new(m, opts.tol)?;
            return Ok(SinkhornResult {
                eta,
                iterations: step + 1,
                residual,
                floored,
            });
        }
    }
    Err(MeasureError::SinkhornNotConverged {
        iterations: opts.max_iter,
        residual,
    })
}

fn sum_defect(m: &DMatrix<f64>) -> f64 {
    let rows = m.row_iter().map(|r| (r.sum() - 1.0).abs());
    let cols = m.column_iter().map(|c| (c.sum() - 1.0).abs());
    rows.chain(cols).fold(0.0, f64::max)
}

/// Mean over all entries of `|η̂ − η| / η`.
pub fn relative_error(eta_hat: &DMatrix<f64>, eta_true: &DMatrix<f64>) -> Result<f64> {
    if eta_hat.shape() != eta_true.shape() {
        return Err(MeasureError::ShapeMismatch(format!(
            "{:?} vs {:?}",
            eta_hat.shape(),
            eta_true.shape()
        )));
    }
    if eta_true.iter().any(|&x| x <= 0.0) {
        return Err(MeasureError::InvalidParameter(
            "reference participation ratios must be positive".into(),
        ));
    }
    let total: f64 = eta_hat
        .iter()
        .zip(eta_true.iter())
        .map(|(a, b)| (a - b).abs() / b)
        .sum();
    Ok(total / eta_true.len() as f64)
}
