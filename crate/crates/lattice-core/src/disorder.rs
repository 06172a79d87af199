//! Seeded cavity-frequency disorder.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{LatticeError, Result};
use crate::hamiltonian::CouplingHamiltonian;

/// Mixes a master seed with task indices into an independent 64-bit seed
/// (splitmix64 finalizer applied per word), so that results do not depend on
/// the order in which parallel tasks run.
pub fn derive_seed(master: u64, indices: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    indices.iter().fold(mix(master), |h, &i| mix(h ^ mix(i)))
}

/// Multiplies every diagonal entry by `1 + N(0, sigma)`, leaving couplings
/// untouched. The draw sequence is a ChaCha8 stream seeded with `seed`, one
/// normal deviate per site in site order, so equal seeds give bit-identical
/// matrices on every platform.
pub fn apply_disorder(
    h: &CouplingHamiltonian,
    sigma: f64,
    seed: u64,
) -> Result<CouplingHamiltonian> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(LatticeError::InvalidParameter(format!(
            "disorder sigma must be finite and non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(h.clone());
    }
    let normal =
        Normal::new(0.0, sigma).map_err(|e| LatticeError::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag: Vec<f64> = h
        .diagonal()
        .into_iter()
        .map(|w| w * (1.0 + normal.sample(&mut rng)))
        .collect();
    h.with_diagonal(&diag)
}
