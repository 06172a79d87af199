//! Optomechanical damping of a mechanical site mode by a driven collective
//! microwave mode.
//!
//! The public API takes and returns ordinary frequencies in Hz. Internally
//! every rate is multiplied by 2π so the Lorentzians mix consistent angular
//! quantities, and the result is converted back at the boundary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{MeasureError, Result};

/// Drive and device parameters for one (collective mode `k`, site `i`) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingConfig {
    /// Red detuning `Δ = ω̃_c − ω_drive` in Hz.
    pub detuning: f64,
    /// Total linewidth of the collective mode in Hz.
    pub kappa_tot: f64,
    /// Input port coupling in Hz.
    pub kappa_1: f64,
    /// Output port coupling in Hz.
    pub kappa_2: f64,
    /// Drive photon flux at the input port in photons per second.
    pub drive_flux: f64,
    /// Line transmittance of the input port at this mode.
    pub transmittance: f64,
    /// Intrinsic mechanical damping in Hz.
    pub gamma_m: f64,
    /// Mechanical frequency in Hz.
    pub omega_m: f64,
    /// Single-photon coupling of the site resonator in Hz.
    pub g0: f64,
}

impl DampingConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("kappa_tot", self.kappa_tot),
            ("kappa_1", self.kappa_1),
            ("kappa_2", self.kappa_2),
            ("drive_flux", self.drive_flux),
            ("transmittance", self.transmittance),
            ("gamma_m", self.gamma_m),
            ("omega_m", self.omega_m),
            ("g0", self.g0),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(MeasureError::InvalidParameter(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if !self.detuning.is_finite() {
            return Err(MeasureError::InvalidParameter(
                "detuning must be finite".into(),
            ));
        }
        if self.kappa_tot <= 0.0 {
            return Err(MeasureError::InvalidParameter(
                "kappa_tot must be positive".into(),
            ));
        }
        if self.kappa_1 + self.kappa_2 > self.kappa_tot * (1.0 + 1e-12) {
            return Err(MeasureError::InvalidParameter(format!(
                "port couplings {} + {} exceed the total linewidth {}",
                self.kappa_1, self.kappa_2, self.kappa_tot
            )));
        }
        Ok(())
    }

    /// `κ_tot < Ω_m`.
    pub fn sideband_resolved(&self) -> bool {
        self.kappa_tot < self.omega_m
    }

    /// Copy with a different drive flux.
    pub fn with_drive_flux(&self, drive_flux: f64) -> Self {
        Self {
            drive_flux,
            ..*self
        }
    }

    /// `Δ² + κ²/4` in angular units.
    fn lorentz_denominator(&self) -> f64 {
        let d = 2.0 * PI * self.detuning;
        let k = 2.0 * PI * self.kappa_tot;
        d * d + k * k / 4.0
    }

    /// `κ/((Ω−Δ)² + κ²/4) − κ/((Ω+Δ)² + κ²/4)` in angular units (1/rad·s).
    fn sideband_asymmetry(&self) -> f64 {
        let d = 2.0 * PI * self.detuning;
        let w = 2.0 * PI * self.omega_m;
        let k = 2.0 * PI * self.kappa_tot;
        let l = |x: f64| k / (x * x + k * k / 4.0);
        l(w - d) - l(w + d)
    }
}

/// Mean photon number `n_c = κ₁·R·ṅ_d / (Δ² + κ²/4)` of the driven mode.
pub fn intracavity_photons(cfg: &DampingConfig) -> f64 {
    2.0 * PI * cfg.kappa_1 * cfg.transmittance * cfg.drive_flux / cfg.lorentz_denominator()
}

/// Optomechanical damping rate in Hz for a site with participation `eta`.
pub fn optomech_damping(cfg: &DampingConfig, eta: f64) -> f64 {
    cfg.drive_flux * damping_slope(cfg, eta)
}

/// `∂Γ_eff/∂ṅ_d` in Hz·s. Linear in `κ₁·R·(η·g₀)²`.
pub fn damping_slope(cfg: &DampingConfig, eta: f64) -> f64 {
    let g = 2.0 * PI * eta * cfg.g0;
    let per_flux = 2.0 * PI * cfg.kappa_1 * cfg.transmittance / cfg.lorentz_denominator();
    per_flux * g * g * cfg.sideband_asymmetry() / (2.0 * PI)
}

/// Inverts a measured damping slope to the unnormalized participation
/// `η̃ = g₀·η·√(κ₁R)`, in units of Hz^(3/2) so that the relation holds with
/// `g₀` and `κ₁` given in Hz.
pub fn unnormalized_eta(slope: f64, cfg: &DampingConfig) -> Result<f64> {
    if !(slope.is_finite() && slope >= 0.0) {
        return Err(MeasureError::InvalidParameter(format!(
            "damping slope must be non-negative, got {slope}"
        )));
    }
    let asym = cfg.sideband_asymmetry();
    if asym <= 0.0 {
        return Err(MeasureError::InvalidParameter(
            "drive must be red-detuned (Δ > 0) to invert the damping slope".into(),
        ));
    }
    // angular: η̃_ang² = slope_ang · (Δ² + κ²/4) / asym, slope_ang = 2π·slope
    let eta_ang = (2.0 * PI * slope * cfg.lorentz_denominator() / asym).sqrt();
    Ok(eta_ang / (2.0 * PI).powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> DampingConfig {
        DampingConfig {
            detuning: 2.2e6,
            kappa_tot: 4e6,
            kappa_1: 0.5e6,
            kappa_2: 0.5e6,
            drive_flux: 1e15,
            transmittance: 1e-6,
            gamma_m: 10.0,
            omega_m: 2.2e6,
            g0: 10.0,
        }
    }

    #[test]
    fn resonant_and_half_width_photon_numbers() {
        let c = DampingConfig {
            detuning: 0.0,
            ..cfg()
        };
        let resonant = 4.0 * (2.0 * PI * c.kappa_1) * c.transmittance * c.drive_flux
            / (2.0 * PI * c.kappa_tot).powi(2);
        assert!((intracavity_photons(&c) / resonant - 1.0).abs() < 1e-14);
        let half = DampingConfig {
            detuning: c.kappa_tot / 2.0,
            ..c
        };
        assert!((intracavity_photons(&half) / resonant - 0.5).abs() < 1e-14);
    }

    #[test]
    fn zero_detuning_and_zero_eta_give_no_damping() {
        assert_eq!(
            optomech_damping(
                &DampingConfig {
                    detuning: 0.0,
                    ..cfg()
                },
                0.5
            ),
            0.0
        );
        assert_eq!(optomech_damping(&cfg(), 0.0), 0.0);
        assert_eq!(damping_slope(&cfg(), 0.0), 0.0);
        assert_eq!(unnormalized_eta(0.0, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn slope_scales_with_eta_squared() {
        let c = cfg();
        let r = damping_slope(&c, 0.4) / damping_slope(&c, 0.2);
        assert!((r - 4.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(cfg().validate().is_ok());
        assert!(DampingConfig {
            kappa_1: 3e6,
            kappa_2: 2e6,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(DampingConfig {
            kappa_tot: 0.0,
            ..cfg()
        }
        .validate()
        .is_err());
        assert!(DampingConfig { g0: -1.0, ..cfg() }.validate().is_err());
        assert!(!cfg().sideband_resolved());
        assert!(DampingConfig {
            kappa_tot: 1e6,
            kappa_1: 0.2e6,
            ..cfg()
        }
        .sideband_resolved());
    }

    #[test]
    fn blue_detuning_cannot_be_inverted() {
        let c = DampingConfig {
            detuning: -2.2e6,
            ..cfg()
        };
        assert!(unnormalized_eta(1e-12, &c).is_err());
        assert!(unnormalized_eta(-1.0, &cfg()).is_err());
    }
}
