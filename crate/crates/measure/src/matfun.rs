//! Principal matrix logarithm and the exponential of anti-Hermitian
//! matrices.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{MeasureError, Result};

/// Eigenvalues closer than this (relative to their modulus) to the negative
/// real axis are treated as lying on the branch cut.
pub const BRANCH_CUT_RTOL: f64 = 1e-6;

const SCHUR_MAX_ITER: usize = 100_000;

/// Principal logarithm of a complex square matrix.
///
/// The matrix is reduced to Schur form `A = Q·T·Q*`; `log T` follows from
/// the Parlett recurrence on the upper triangle with `log` applied to the
/// diagonal, and `log A = Q·log T·Q*`.
pub fn logm(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(MeasureError::Singular("zero or non-finite matrix".into()));
    }
    let (q, t) = Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| MeasureError::Singular("Schur decomposition did not converge".into()))?
        .unpack();
    for i in 0..n {
        let l = t[(i, i)];
        if l.norm() < 1e-12 * scale {
            return Err(MeasureError::Singular(format!("eigenvalue {l:e} is zero")));
        }
        if l.re < 0.0 && l.im.abs() < BRANCH_CUT_RTOL * l.norm() {
            return Err(MeasureError::BranchCut { re: l.re, im: l.im });
        }
    }

    let mut f = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        f[(i, i)] = t[(i, i)].ln();
    }
    let near = 1e-10 * scale;
    for d in 1..n {
        for i in 0..n - d {
            let j = i + d;
            let (ti, tj) = (t[(i, i)], t[(j, j)]);
            let diff = tj - ti;
            let mut coupling = Complex64::new(0.0, 0.0);
            for k in i + 1..j {
                coupling += t[(i, k)] * f[(k, j)] - f[(i, k)] * t[(k, j)];
            }
            f[(i, j)] = if diff.norm() > near {
                (t[(i, j)] * (f[(j, j)] - f[(i, i)]) + coupling) / diff
            } else {
                // repeated eigenvalue: the divided difference of log tends
                // to 1/λ and the coupling sum has to vanish with it
                if coupling.norm() > 1e-8 * scale {
                    return Err(MeasureError::Singular(
                        "repeated eigenvalue with non-trivial Jordan structure".into(),
                    ));
                }
                t[(i, j)] / ti
            };
        }
    }
    Ok(&q * f * q.adjoint())
}

/// `exp(A)` for anti-Hermitian `A`, from the Hermitian eigendecomposition of
/// `iA = W·D·W*` as `W·exp(−iD)·W*`.
pub fn expm_antihermitian(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let i = Complex64::new(0.0, 1.0);
    let h = a.map(|z| z * i);
    let herm_defect = (&h - h.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    if herm_defect > 1e-10 * scale {
        return Err(MeasureError::InvalidParameter(format!(
            "matrix is not anti-Hermitian (defect {herm_defect:e})"
        )));
    }
    let h = (&h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| MeasureError::Singular("Hermitian eigensolver did not converge".into()))?;
    let w = eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|d| Complex64::new(0.0, -d).exp()));
    Ok(&w * phases * w.adjoint())
}

/// Distance of the spectrum of a real matrix from the negative real axis
/// (including the origin), relative to the largest eigenvalue modulus.
pub fn branch_cut_margin(a: &DMatrix<f64>) -> f64 {
    let eig = a.complex_eigenvalues();
    let scale = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    eig.iter()
        .map(|z| if z.re < 0.0 { z.im.abs() } else { z.norm() })
        .fold(f64::INFINITY, f64::min)
        / scale
}

pub(crate) fn to_complex(a: &DMatrix<f64>) -> DMatrix<Complex64> {
    a.map(|x| Complex64::new(x, 0.0))
}
