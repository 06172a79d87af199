use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{CircuitError, Result};

/// Mode factor of the fundamental drumhead mode, close to the first zero
/// 2.405 of the Bessel function J₀.
pub const DRUMHEAD_MODE_FACTOR: f64 = 2.4;

/// Fundamental frequency `(1/2π)(2.4/R)√(σ/ρ)` of a tensioned circular membrane
/// of radius `r` m, stress `stress` Pa and density `density` kg/m³.
pub fn drumhead_frequency(r: f64, stress: f64, density: f64) -> Result<f64> {
    for (name, v) in [("radius", r), ("stress", stress), ("density", density)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CircuitError::InvalidParameter(format!(
                "{name} = {v} must be positive"
            )));
        }
    }
    Ok(DRUMHEAD_MODE_FACTOR / r * (stress / density).sqrt() / (2.0 * PI))
}

/// `σ/ρ` (m²/s²) that reproduces `f = a/R` with `a` in Hz·m.
pub fn stress_density_ratio(a: f64) -> f64 {
    (2.0 * PI * a / DRUMHEAD_MODE_FACTOR).powi(2)
}

/// Least-squares fit of `f_i = a / R_i` with radii `R_i = r1 − step·i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrumheadFit {
    /// Hz·m.
    pub a: f64,
    /// Radius of the first site in m.
    pub r1: f64,
    pub step: f64,
    /// `f_i − a/R_i` in Hz for every input frequency.
    pub residuals: Vec<f64>,
}

impl DrumheadFit {
    pub fn radius(&self, i: usize) -> f64 {
        self.r1 - self.step * i as f64
    }

    pub fn predict(&self, i: usize) -> f64 {
        self.a / self.radius(i)
    }
}

/// Best `a` for fixed radii: minimizes `Σ (f_i − a/R_i)²` in closed form.
fn amplitude(kept: &[(usize, f64)], r1: f64, step: f64) -> f64 {
    let (num, den) = kept.iter().fold((0.0, 0.0), |(n, d), &(i, f)| {
        let r = r1 - step * i as f64;
        (n + f / r, d + 1.0 / (r * r))
    });
    num / den
}

/// Fits `a` and the first radius `r1` to frequencies of sites whose radii
/// shrink by `step` per site. Sites listed in `exclude` are left out of the
/// fit but still get a residual.
pub fn fit_drumhead_radii(freqs: &[f64], step: f64, exclude: &[usize]) -> Result<DrumheadFit> {
    if freqs.iter().any(|f| !(f.is_finite() && *f > 0.0)) || !(step.is_finite() && step >= 0.0) {
        return Err(CircuitError::InvalidParameter(
            "frequencies must be positive and the radius step non-negative".into(),
        ));
    }
    let kept: Vec<(usize, f64)> = freqs
        .iter()
        .copied()
        .enumerate()
        .filter(|(i, _)| !exclude.contains(i))
        .collect();
    if kept.len() < 3 {
        return Err(CircuitError::Fit("need at least three sites".into()));
    }
    let n = freqs.len();
    let objective = |log_r1: f64| -> f64 {
        let r1 = log_r1.exp();
        let a = amplitude(&kept, r1, step);
        kept.iter()
            .map(|&(i, f)| (f - a / (r1 - step * i as f64)).powi(2))
            .sum()
    };
    // Every radius must stay positive. Far above `step·n` the model tends to
    // a constant frequency, so the search stops at 10⁴ times that.
    let lo = (step * n as f64 * (1.0 + 1e-9)).max(f64::MIN_POSITIVE).ln();
    let hi = lo + 1e4f64.ln();
    let samples = 400;
    let grid: Vec<f64> = (0..=samples)
        .map(|i| lo + (hi - lo) * i as f64 / samples as f64)
        .collect();
    let best = (0..=samples)
        .min_by(|&i, &j| objective(grid[i]).total_cmp(&objective(grid[j])))
        .unwrap_or(0);
    let (mut a_, mut b_) = (grid[best.saturating_sub(1)], grid[(best + 1).min(samples)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b_ - g * (b_ - a_);
        let d = a_ + g * (b_ - a_);
        if objective(c) < objective(d) {
            b_ = d;
        } else {
            a_ = c;
        }
    }
    let r1 = (0.5 * (a_ + b_)).exp();
    let a = amplitude(&kept, r1, step);
    let residuals = (0..n)
        .map(|i| freqs[i] - a / (r1 - step * i as f64))
        .collect();
    Ok(DrumheadFit {
        a,
        r1,
        step,
        residuals,
    })
}
