use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{LatticeError, Result};
use crate::hamiltonian::{BlochHamiltonian, CouplingHamiltonian};

/// Relative eigenvalue gap below which two modes count as degenerate.
pub const DEGENERACY_RTOL: f64 = 1e-10;
/// Entries smaller than this are skipped by the sign convention.
pub const SIGN_THRESHOLD: f64 = 1e-12;

const EIGEN_EPS: f64 = f64::EPSILON;
const EIGEN_MAX_ITER: usize = 100_000;

/// Eigenfrequencies and modeshapes of a real lattice Hamiltonian.
///
/// `modeshapes` is the orthogonal matrix `U_ψ` with mode `k` in row `k`, so
/// `[U_ψ]_{k,i} = ψ_i^k` and `U_ψ · H · U_ψᵀ = diag(eigenfreqs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    eigenfreqs: Vec<f64>,
    modeshapes: DMatrix<f64>,
}

impl ModeSet {
    /// Assembles a mode set from parts, checking ordering and orthogonality.
    pub fn from_parts(eigenfreqs: Vec<f64>, modeshapes: DMatrix<f64>) -> Result<Self> {
        let n = eigenfreqs.len();
        if modeshapes.nrows() != n || modeshapes.ncols() != n {
            return Err(LatticeError::SiteCount {
                expected: n,
                got: modeshapes.nrows(),
            });
        }
        if eigenfreqs.windows(2).any(|w| w[1] < w[0]) {
            return Err(LatticeError::InvalidParameter(
                "eigenfrequencies must be ascending".into(),
            ));
        }
        let dev = orthogonality_defect(&modeshapes);
        if dev > 1e-10 {
            return Err(LatticeError::InvalidParameter(format!(
                "modeshape matrix is not orthogonal (max |UUᵀ - I| = {dev:e})"
            )));
        }
        Ok(Self {
            eigenfreqs,
            modeshapes,
        })
    }

    pub fn eigenfreqs(&self) -> &[f64] {
        &self.eigenfreqs
    }

    pub fn modeshapes(&self) -> &DMatrix<f64> {
        &self.modeshapes
    }

    pub fn dim(&self) -> usize {
        self.eigenfreqs.len()
    }

    /// Modeshape of mode `k` (zero-based) over all sites.
    pub fn mode(&self, k: usize) -> Vec<f64> {
        self.modeshapes.row(k).iter().copied().collect()
    }

    /// `U_ψᵀ · diag(ω) · U_ψ`.
    pub fn recompose(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenfreqs));
        self.modeshapes.transpose() * d * &self.modeshapes
    }
}

/// Largest elementwise deviation of `U·Uᵀ` from the identity.
pub fn orthogonality_defect(u: &DMatrix<f64>) -> f64 {
    let p = u * u.transpose();
    let n = p.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - target).abs());
        }
    }
    worst
}

/// Diagonalizes a real symmetric lattice Hamiltonian.
///
/// Eigenfrequencies come out ascending. Within a degenerate group the basis
/// is replaced by the Gram–Schmidt orthonormalization of the projected unit
/// vectors `P e_1, P e_2, …`, which does not depend on the eigensolver's
/// arbitrary rotation. Each row is then signed so that its first entry above
/// [`SIGN_THRESHOLD`] is positive.
pub fn diagonalize(h: &CouplingHamiltonian) -> Result<ModeSet> {
    let m = h.matrix();
    let n = m.nrows();
    let scale = h.max_abs();
    // Shifting by the mean diagonal keeps the couplings from drowning in the
    // GHz-scale on-site term.
    let shift = m.diagonal().mean();
    let a = m - DMatrix::<f64>::identity(n, n) * shift;
    let (vals, vecs) = solve(a, n, scale)?;
    let vals: Vec<f64> = vals.into_iter().map(|v| v + shift).collect();
    let modeshapes = canonical_rows(&vals, vecs, scale);
    let set = ModeSet {
        eigenfreqs: vals,
        modeshapes,
    };
    check_residual(m, &set.modeshapes, &set.eigenfreqs, scale)?;
    Ok(set)
}

/// Eigenvalues and complex modeshapes of a ribbon Bloch Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochModes {
    eigenvalues: Vec<f64>,
    modeshapes: DMatrix<Complex64>,
}

impl BlochModes {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary matrix with mode `k` in row `k`.
    pub fn modeshapes(&self) -> &DMatrix<Complex64> {
        &self.modeshapes
    }
}

/// Complex Hermitian counterpart of [`diagonalize`]. The phase convention makes
/// the first entry above [`SIGN_THRESHOLD`] in each row real and positive.
pub fn diagonalize_bloch(h: &BlochHamiltonian) -> Result<BlochModes> {
    let n = h.dim();
    let scale = h.max_abs();
    let (vals, vecs) = solve(h.matrix().clone(), n, scale)?;
    let modeshapes = canonical_rows(&vals, vecs, scale);
    Ok(BlochModes {
        eigenvalues: vals,
        modeshapes,
    })
}

/// Ascending eigenvalues of a ribbon Hamiltonian without eigenvectors.
pub fn bloch_eigenvalues(h: &BlochHamiltonian) -> Result<Vec<f64>> {
    if h.matrix()
        .iter()
        .any(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(LatticeError::NoConvergence {
            dim: h.dim(),
            scale: h.max_abs(),
            residual: f64::NAN,
        });
    }
    let mut vals: Vec<f64> = h.matrix().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

fn solve<T>(a: DMatrix<T>, n: usize, scale: f64) -> Result<(Vec<f64>, DMatrix<T>)>
where
    T: ComplexField<RealField = f64>,
{
    let eig = SymmetricEigen::try_new(a, EIGEN_EPS, EIGEN_MAX_ITER).ok_or(
        LatticeError::NoConvergence {
            dim: n,
            scale,
            residual: f64::NAN,
        },
    )?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    // rows = modes
    let mut rows = DMatrix::<T>::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            rows[(k, i)] = eig.eigenvectors[(i, src)].clone();
        }
    }
    Ok((vals, rows))
}

fn canonical_rows<T>(vals: &[f64], mut rows: DMatrix<T>, scale: f64) -> DMatrix<T>
where
    T: ComplexField<RealField = f64>,
{
    let n = vals.len();
    let tol = DEGENERACY_RTOL * scale.max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (vals[end] - vals[end - 1]).abs() < tol {
            end += 1;
        }
        if end - start > 1 {
            canonicalize_block(&mut rows, start, end);
        }
        start = end;
    }
    for k in 0..n {
        fix_phase(&mut rows, k);
    }
    rows
}

/// Replaces rows `start..end` by the orthonormalized projections of the unit
/// vectors onto their span.
fn canonicalize_block<T>(rows: &mut DMatrix<T>, start: usize, end: usize)
where
    T: ComplexField<RealField = f64>,
{
    let n = rows.ncols();
    let m = end - start;
    let basis: Vec<DVector<T>> = (start..end)
        .map(|k| rows.row(k).transpose().map(|x| x.conjugate()))
        .collect();
    let mut accepted: Vec<DVector<T>> = Vec::with_capacity(m);
    for j in 0..n {
        if accepted.len() == m {
            break;
        }
        // P e_j = Σ_b b · conj(b_j)
        let mut v = DVector::<T>::zeros(n);
        for b in &basis {
            v.axpy(b[j].clone().conjugate(), b, T::one());
        }
        for _ in 0..2 {
            for q in &accepted {
                let c = q.dotc(&v);
                v.axpy(-c, q, T::one());
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            accepted.push(v.unscale(norm));
        }
    }
    for (offset, v) in accepted.into_iter().enumerate() {
        for i in 0..n {
            rows[(start + offset, i)] = v[i].clone().conjugate();
        }
    }
}

fn fix_phase<T>(rows: &mut DMatrix<T>, k: usize)
where
    T: ComplexField<RealField = f64>,
{
    let n = rows.ncols();
    if let Some(i) = (0..n).find(|&i| rows[(k, i)].clone().modulus() > SIGN_THRESHOLD) {
        let x = rows[(k, i)].clone();
        let unit = x.clone().unscale(x.modulus());
        let rot = unit.conjugate();
        for j in 0..n {
            rows[(k, j)] = rows[(k, j)].clone() * rot.clone();
        }
    }
}

fn check_residual(h: &DMatrix<f64>, u: &DMatrix<f64>, vals: &[f64], scale: f64) -> Result<()> {
    let d = u * h * u.transpose();
    let n = vals.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { vals[i] } else { 0.0 };
            worst = worst.max((d[(i, j)] - target).abs());
        }
    }
    if worst > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(LatticeError::NoConvergence {
            dim: n,
            scale,
            residual: worst,
        });
    }
    Ok(())
}
