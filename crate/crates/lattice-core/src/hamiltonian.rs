use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{LatticeError, Result};

/// Relative tolerance used for every Hermiticity check in the crate.
pub(crate) const HERMITIAN_RTOL: f64 = 1e-9;

/// Dense real symmetric lattice Hamiltonian in Hz.
///
/// Diagonal entries are the cavity frequencies `ω_c,i/2π`, off-diagonal entries
/// the couplings `J_ij/2π`. All lattices in scope have real inductive couplings,
/// so the matrix is stored as `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingHamiltonian {
    matrix: DMatrix<f64>,
    site_labels: Vec<String>,
}

impl CouplingHamiltonian {
    /// Wraps a matrix after checking shape and symmetry. Labels default to
    /// `"1"…"n"` when `site_labels` is `None`.
    pub fn new(matrix: DMatrix<f64>, site_labels: Option<Vec<String>>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(LatticeError::InvalidParameter(format!(
                "Hamiltonian must be square, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        if n == 0 {
            return Err(LatticeError::InvalidParameter("empty Hamiltonian".into()));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(LatticeError::InvalidParameter(
                "Hamiltonian has non-finite entries".into(),
            ));
        }
        let site_labels = match site_labels {
            Some(l) if l.len() != n => {
                return Err(LatticeError::SiteCount {
                    expected: n,
                    got: l.len(),
                })
            }
            Some(l) => l,
            None => default_labels(n),
        };
        check_symmetric(&matrix)?;
        Ok(Self {
            matrix,
            site_labels,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn site_labels(&self) -> &[String] {
        &self.site_labels
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.amax()
    }

    /// On-site frequencies.
    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().copied().collect()
    }

    /// Copy with the diagonal replaced, labels and couplings kept.
    pub fn with_diagonal(&self, diag: &[f64]) -> Result<Self> {
        if diag.len() != self.dim() {
            return Err(LatticeError::SiteCount {
                expected: self.dim(),
                got: diag.len(),
            });
        }
        let mut m = self.matrix.clone();
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        Self::new(m, Some(self.site_labels.clone()))
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let scale = m.amax();
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let dev = (m[(i, j)] - m[(j, i)]).abs();
            if dev > HERMITIAN_RTOL * scale {
                return Err(LatticeError::NotHermitian {
                    row: i,
                    col: j,
                    deviation: dev,
                    scale,
                });
            }
        }
    }
    Ok(())
}

/// Complex Hermitian Hamiltonian of a wavenumber-resolved ribbon chain.
///
/// Entries are in Hz relative to the (uniform) cavity frequency, so the
/// spectrum of a bipartite ribbon is symmetric about zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochHamiltonian {
    matrix: DMatrix<Complex64>,
    site_labels: Vec<String>,
    k_par: f64,
}

impl BlochHamiltonian {
    pub fn new(matrix: DMatrix<Complex64>, site_labels: Vec<String>, k_par: f64) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(LatticeError::InvalidParameter(format!(
                "Bloch Hamiltonian must be square and non-empty, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        if site_labels.len() != n {
            return Err(LatticeError::SiteCount {
                expected: n,
                got: site_labels.len(),
            });
        }
        check_hermitian(&matrix)?;
        Ok(Self {
            matrix,
            site_labels,
            k_par,
        })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn site_labels(&self) -> &[String] {
        &self.site_labels
    }

    pub fn k_par(&self) -> f64 {
        self.k_par
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn check_hermitian(m: &DMatrix<Complex64>) -> Result<()> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > HERMITIAN_RTOL * scale {
                return Err(LatticeError::NotHermitian {
                    row: i,
                    col: j,
                    deviation: dev,
                    scale,
                });
            }
        }
    }
    Ok(())
}
