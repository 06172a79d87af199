//! From normalized participation ratios back to modeshapes and the coupling
//! Hamiltonian.

use nalgebra::{DMatrix, DVector};
use omlat_core::{orthogonality_defect, CouplingHamiltonian, ModeSet, ParticipationMatrix};

use crate::error::{MeasureError, Result};
use crate::matfun::{branch_cut_margin, expm_antihermitian, logm, to_complex};

/// Largest `|UUᵀ − I|` accepted by [`reconstruct_hamiltonian`].
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Pairs measured modes with reference modes by eigenfrequency. Both lists
/// are ranked and matched rank for rank, which minimizes the total frequency
/// mismatch for equal-size sets. Returns the reference index per measured
/// mode.
pub fn match_modes(measured_freqs: &[f64], reference_freqs: &[f64]) -> Result<Vec<usize>> {
    if measured_freqs.len() != reference_freqs.len() {
        return Err(MeasureError::ShapeMismatch(format!(
            "{} measured modes but {} reference modes",
            measured_freqs.len(),
            reference_freqs.len()
        )));
    }
    let rank = |f: &[f64]| {
        let mut idx: Vec<usize> = (0..f.len()).collect();
        idx.sort_by(|&a, &b| f[a].total_cmp(&f[b]));
        idx
    };
    let (m, r) = (rank(measured_freqs), rank(reference_freqs));
    let mut out = vec![0; m.len()];
    for (mi, ri) in m.into_iter().zip(r) {
        out[mi] = ri;
    }
    Ok(out)
}

/// Signed modeshape estimate `Ũ_{k,i} = sign(ψ_i^k)·√η̂_i^k`, with the sign
/// taken from the reference mode matched to measured mode `k`. Reference
/// entries of exactly zero count as positive.
pub fn assign_signs(
    eta_hat: &ParticipationMatrix,
    measured_freqs: &[f64],
    reference: &ModeSet,
) -> Result<DMatrix<f64>> {
    let n = eta_hat.dim();
    if reference.dim() != n {
        return Err(MeasureError::ShapeMismatch(format!(
            "{n} measured sites but the reference has {}",
            reference.dim()
        )));
    }
    let rows = match_modes(measured_freqs, reference.eigenfreqs())?;
    let psi = reference.modeshapes();
    Ok(DMatrix::from_fn(n, n, |k, i| {
        let s = if psi[(rows[k], i)] < 0.0 { -1.0 } else { 1.0 };
        s * eta_hat.get(k, i).sqrt()
    }))
}

/// Nearest orthogonal matrix in the sense of the generator decomposition:
/// `G = log Ũ`, `U = exp((G − G*)/2)`.
///
/// Fails when `Ũ` is singular or has an eigenvalue on the negative real
/// axis. In that case the unorthogonalized `Ũ` is the fallback report.
pub fn orthogonalize(u_tilde: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !u_tilde.is_square() || u_tilde.nrows() == 0 {
        return Err(MeasureError::ShapeMismatch(format!(
            "expected a non-empty square matrix, got {:?}",
            u_tilde.shape()
        )));
    }
    let g = logm(&to_complex(u_tilde))?;
    let anti = (&g - g.adjoint()).scale(0.5);
    let u = expm_antihermitian(&anti)?;
    let imag = u.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > 1e-8 {
        return Err(MeasureError::Singular(format!(
            "the logarithm is not real (imaginary part {imag:e} after exponentiation)"
        )));
    }
    Ok(u.map(|z| z.re))
}

/// Row signs are a gauge freedom of the modeshape matrix: flipping a row
/// leaves `Uᵀ·diag(ω)·U` unchanged. This picks the flip pattern (none, one
/// row, or two rows) that keeps the spectrum of `D·Ũ` furthest from the
/// branch cut, orthogonalizes `D·Ũ`, and undoes the flips.
pub fn orthogonalize_gauged(u_tilde: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = u_tilde.nrows();
    let flip = |rows: &[usize]| {
        let mut m = u_tilde.clone();
        for &r in rows {
            m.row_mut(r).neg_mut();
        }
        m
    };
    let mut best: (Vec<usize>, f64) = (vec![], branch_cut_margin(u_tilde));
    if best.1 < 0.1 && n > 0 {
        let det_negative = u_tilde.determinant() < 0.0;
        let candidates: Vec<Vec<usize>> = if det_negative {
            (0..n).map(|r| vec![r]).collect()
        } else {
            (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| vec![a, b]))
                .collect()
        };
        for rows in candidates {
            let margin = branch_cut_margin(&flip(&rows));
            if margin > best.1 {
                best = (rows, margin);
            }
        }
    }
    let mut u = orthogonalize(&flip(&best.0))?;
    for &r in &best.0 {
        u.row_mut(r).neg_mut();
    }
    Ok(u)
}

/// A reconstructed Hamiltonian in the frame rotating at the mean cavity
/// frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedHamiltonian {
    /// `Uᵀ·diag(ω)·U − ω̄·I`.
    pub hamiltonian: CouplingHamiltonian,
    /// `ω̄`, the mean of the eigenfrequencies, in Hz.
    pub mean_frequency: f64,
}

impl ReconstructedHamiltonian {
    /// The Hamiltonian with the mean frequency added back on the diagonal.
    pub fn absolute(&self) -> DMatrix<f64> {
        let n = self.hamiltonian.dim();
        self.hamiltonian.matrix() + DMatrix::identity(n, n) * self.mean_frequency
    }
}

/// `H = Uᵀ·diag(ω)·U`, symmetrized, with the mean frequency removed from the
/// diagonal. Mode `k` of `U` (row `k`) pairs with `eigenfreqs[k]`.
pub fn reconstruct_hamiltonian(
    u: &DMatrix<f64>,
    eigenfreqs: &[f64],
) -> Result<ReconstructedHamiltonian> {
    let n = eigenfreqs.len();
    if u.shape() != (n, n) || n == 0 {
        return Err(MeasureError::ShapeMismatch(format!(
            "{:?} modeshape matrix for {n} eigenfrequencies",
            u.shape()
        )));
    }
    let defect = orthogonality_defect(u);
    if defect > ORTHOGONALITY_TOL {
        return Err(MeasureError::NotOrthogonal { defect });
    }
    let mean = eigenfreqs.iter().sum::<f64>() / n as f64;
    let shifted = DVector::from_iterator(n, eigenfreqs.iter().map(|w| w - mean));
    let h = u.transpose() * DMatrix::from_diagonal(&shifted) * u;
    let h = (&h + h.transpose()).scale(0.5);
    Ok(ReconstructedHamiltonian {
        hamiltonian: CouplingHamiltonian::new(h, None)?,
        mean_frequency: mean,
    })
}

/// Relative single-photon couplings `ḡ₀,i ∝ mean_k η̃_i^k / η̂_i^k`,
/// normalized to sum to one.
///
/// The ratio carries a mode-dependent factor `√(κ₁R)` common to every site,
/// so any subset of modes gives the same ratios up to noise. `modes`
/// restricts the average (a single well-measured mode reproduces a
/// one-mode analysis); `None` averages over all modes. Entries where either
/// ratio is zero carry no coupling information (a clipped slope at a
/// modeshape node) and are skipped.
pub fn relative_g0(
    eta_tilde: &DMatrix<f64>,
    eta_hat: &ParticipationMatrix,
    modes: Option<&[usize]>,
) -> Result<Vec<f64>> {
    let n = eta_hat.dim();
    if eta_tilde.shape() != (n, n) {
        return Err(MeasureError::ShapeMismatch(format!(
            "{:?} unnormalized vs {n}x{n} normalized ratios",
            eta_tilde.shape()
        )));
    }
    let all: Vec<usize> = (0..n).collect();
    let modes = modes.unwrap_or(&all);
    if modes.is_empty() || modes.iter().any(|&k| k >= n) {
        return Err(MeasureError::InvalidParameter(format!(
            "mode selection {modes:?} is empty or out of range"
        )));
    }
    let raw: Vec<f64> = (0..n)
        .map(|i| {
            let (sum, count) = modes
                .iter()
                .filter(|&&k| eta_hat.get(k, i) > 0.0 && eta_tilde[(k, i)] > 0.0)
                .fold((0.0, 0usize), |(s, c), &k| {
                    (s + eta_tilde[(k, i)] / eta_hat.get(k, i), c + 1)
                });
            if count == 0 {
                0.0
            } else {
                sum / count as f64
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(MeasureError::InvalidParameter(
            "unnormalized ratios carry no signal".into(),
        ));
    }
    Ok(raw.into_iter().map(|g| g / total).collect())
}

/// Absolute couplings from relative ones and one anchored site.
pub fn anchor_g0(relative: &[f64], site: usize, g0_site: f64) -> Result<Vec<f64>> {
    match relative.get(site) {
        Some(&r) if r > 0.0 => Ok(relative.iter().map(|g| g / r * g0_site).collect()),
        _ => Err(MeasureError::InvalidParameter(format!(
            "anchor site {site} is out of range or has zero coupling"
        ))),
    }
}
