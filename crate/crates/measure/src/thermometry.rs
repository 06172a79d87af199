//! Sideband thermometry: the ratio of output sideband photons to
//! transmitted drive photons grows linearly with the thermal phonon number,
//! with a slope set by the effective coupling `η·g₀`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::damping::DampingConfig;
use crate::error::{MeasureError, Result};

/// `n_sb/n_d,out = (η·g₀)²·n_m/(Ω_m² + κ²/4)` for a resonant drive. The
/// ratio is dimensionless, so any common frequency unit works.
pub fn sideband_ratio(cfg: &DampingConfig, eta_g0: f64, n_m: f64) -> f64 {
    eta_g0 * eta_g0 * n_m / lorentz(cfg)
}

fn lorentz(cfg: &DampingConfig) -> f64 {
    cfg.omega_m * cfg.omega_m + cfg.kappa_tot * cfg.kappa_tot / 4.0
}

/// Least-squares slope of a line through the origin.
pub fn slope_through_origin(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.is_empty() {
        return Err(MeasureError::ShapeMismatch(format!(
            "{} abscissae for {} ordinates",
            x.len(),
            y.len()
        )));
    }
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    if sxx <= 0.0 {
        return Err(MeasureError::InvalidParameter(
            "all phonon numbers are zero".into(),
        ));
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sxx)
}

/// `η·g₀ = √(slope·(Ω_m² + κ²/4))`, in the unit of `cfg`'s frequencies.
pub fn eta_g0_from_slope(cfg: &DampingConfig, slope: f64) -> Result<f64> {
    if !(slope > 0.0) {
        return Err(MeasureError::NonPositiveSlope(slope));
    }
    Ok((slope * lorentz(cfg)).sqrt())
}

/// One simulated temperature sweep and its inversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermometryResult {
    pub n_m: Vec<f64>,
    pub ratios: Vec<f64>,
    pub slope: f64,
    /// Estimated `η·g₀`.
    pub eta_g0: f64,
}

/// Simulates sideband ratios at each phonon number with multiplicative
/// Gaussian noise of relative size `rel_noise`, fits the slope and inverts
/// it.
pub fn sideband_thermometry(
    cfg: &DampingConfig,
    eta_g0: f64,
    n_m: &[f64],
    rel_noise: f64,
    seed: u64,
) -> Result<ThermometryResult> {
    if n_m.iter().any(|n| !(n.is_finite() && *n >= 0.0)) {
        return Err(MeasureError::InvalidParameter(
            "phonon numbers must be finite and non-negative".into(),
        ));
    }
    let noise =
        Normal::new(0.0, rel_noise).map_err(|e| MeasureError::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ratios: Vec<f64> = n_m
        .iter()
        .map(|&n| sideband_ratio(cfg, eta_g0, n) * (1.0 + noise.sample(&mut rng)))
        .collect();
    let slope = slope_through_origin(n_m, &ratios)?;
    Ok(ThermometryResult {
        n_m: n_m.to_vec(),
        eta_g0: eta_g0_from_slope(cfg, slope)?,
        ratios,
        slope,
    })
}
