//! Edge-state hybridization factor of an SSH chain.

use omlat_core::ParticipationMatrix;

use crate::error::{DisorderError, Result};

/// `ζ = ½·Σ_{k ∈ {N, N+1}} min(η₁^k, η_2N^k) / max(η₁^k, η_2N^k)` for a chain
/// of `n_cells = N` cells.
///
/// The mid-gap pair is taken by frequency rank, modes `N` and `N+1` of the
/// ascending spectrum (rows `N−1` and `N`). ζ is 1 when both edge states
/// weigh the two chain ends equally and falls to 0 when each state sits on
/// one end only. A mode with no weight on either end contributes 0.
pub fn hybridization_factor(eta: &ParticipationMatrix, n_cells: usize) -> Result<f64> {
    let n = 2 * n_cells;
    if n_cells == 0 || eta.dim() != n {
        return Err(DisorderError::InvalidParameter(format!(
            "{}-site participation matrix for a {n_cells}-cell chain",
            eta.dim()
        )));
    }
    let ratio = |k: usize| {
        let (a, b) = (eta.get(k, 0), eta.get(k, n - 1));
        let hi = a.max(b);
        if hi > 0.0 {
            a.min(b) / hi
        } else {
            0.0
        }
    };
    Ok(0.5 * (ratio(n_cells - 1) + ratio(n_cells)))
}
