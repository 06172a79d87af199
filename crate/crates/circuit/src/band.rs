use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{CircuitError, Result};

/// A single LC resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitCell {
    /// Inductance in H.
    pub l: f64,
    /// Capacitance in F.
    pub c: f64,
}

impl CircuitCell {
    pub fn new(l: f64, c: f64) -> Result<Self> {
        let cell = Self { l, c };
        cell.validate()?;
        Ok(cell)
    }

    /// Cell with inductance `l` tuned to resonate at `freq` Hz.
    pub fn with_frequency(l: f64, freq: f64) -> Result<Self> {
        if !(freq.is_finite() && freq > 0.0) {
            return Err(CircuitError::InvalidParameter(format!(
                "frequency {freq} Hz"
            )));
        }
        Self::new(l, 1.0 / (l * (2.0 * PI * freq).powi(2)))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("L", self.l), ("C", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CircuitError::InvalidParameter(format!(
                    "{name} = {v} must be positive"
                )));
            }
        }
        Ok(())
    }

    /// `1 / (2π √(LC))` in Hz.
    pub fn frequency(&self) -> f64 {
        1.0 / (2.0 * PI * (self.l * self.c).sqrt())
    }
}

fn check_mutual(cell: &CircuitCell, m: f64) -> Result<()> {
    cell.validate()?;
    if !m.is_finite() || m.abs() >= cell.l {
        return Err(CircuitError::NonPhysicalCoupling { m, l: cell.l });
    }
    Ok(())
}

/// Normal modes `(f₋, f₊)` of two identical cells coupled by mutual
/// inductance `m`: `f± = f_c / √(1 ∓ M/L)`. For `M > 0` the higher mode
/// carries symmetric currents `I₁ = I₂`.
pub fn dimer_eigenfrequencies(cell: &CircuitCell, m: f64) -> Result<(f64, f64)> {
    check_mutual(cell, m)?;
    let fc = cell.frequency();
    let x = m.abs() / cell.l;
    Ok((fc / (1.0 + x).sqrt(), fc / (1.0 - x).sqrt()))
}

/// Coupling rate `J = f_c·M / 2L` in Hz.
pub fn coupling_rate(cell: &CircuitCell, m: f64) -> Result<f64> {
    check_mutual(cell, m)?;
    Ok(cell.frequency() * m / (2.0 * cell.l))
}

/// Mutual inductance that gives coupling rate `j` Hz, the inverse of
/// [`coupling_rate`].
pub fn mutual_for_coupling(cell: &CircuitCell, j: f64) -> Result<f64> {
    cell.validate()?;
    let m = 2.0 * cell.l * j / cell.frequency();
    check_mutual(cell, m)?;
    Ok(m)
}

/// Bands `(f₋, f₊)` of the infinite chain with alternating mutual inductances
/// `m` and `mp` at Bloch phase `beta`:
/// `f = f_c / √(1 ± √(M² + M′² + 2MM′cos β) / L)`.
pub fn infinite_chain_band(beta: f64, cell: &CircuitCell, m: f64, mp: f64) -> Result<(f64, f64)> {
    cell.validate()?;
    let s2 = m * m + mp * mp + 2.0 * m * mp * beta.cos();
    let s = s2.max(0.0).sqrt();
    if !s.is_finite() || s >= cell.l {
        return Err(CircuitError::NonPhysicalCoupling { m: s, l: cell.l });
    }
    let fc = cell.frequency();
    Ok((
        fc / (1.0 + s / cell.l).sqrt(),
        fc / (1.0 - s / cell.l).sqrt(),
    ))
}

/// Upper and lower passbands of the coupled-mode chain, each as `[min, max]` in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Passbands {
    pub upb: [f64; 2],
    pub lpb: [f64; 2],
}

/// `ω_c ± |J ± J′|` band edges of the coupled-mode SSH chain.
pub fn passband_edges(fc: f64, j: f64, jp: f64) -> Passbands {
    let inner = (j - jp).abs();
    let outer = j.abs() + jp.abs();
    Passbands {
        upb: [fc + inner, fc + outer],
        lpb: [fc - outer, fc - inner],
    }
}
