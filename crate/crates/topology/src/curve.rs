use std::f64::consts::PI;

use num_complex::Complex64;
use omlat_core::BlochSeries;

use crate::error::{Result, TopologyError};

/// Brillouin-zone samples used for windings and Zak phases.
pub const DEFAULT_BZ_SAMPLES: usize = 4096;

/// `min |ρ| ≤ GAP_RTOL · max |ρ|` counts as gapless.
pub const GAP_RTOL: f64 = 1e-9;

/// Largest phase step accepted between neighbouring samples before the
/// curve is resampled more finely.
const MAX_PHASE_STEP: f64 = PI / 4.0;
const MAX_SAMPLES: usize = 1 << 22;

/// `ρ(k)` sampled over one Brillouin zone `[-π, π)` with its unwrapped phase
/// `φ = -arg ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkCurve {
    samples: Vec<(f64, Complex64)>,
    phase: Vec<f64>,
    /// Phase change from the last sample back to the first.
    closing_step: f64,
}

impl BulkCurve {
    /// Samples `k_i = -π + 2πi/n`. The grid is refined by factors of two
    /// until no phase step exceeds π/4, so near-gapless curves are not
    /// mis-unwrapped.
    pub fn sample(series: &BlochSeries, n: usize) -> Result<Self> {
        let closure = (series.rho(PI) - series.rho(-PI)).norm();
        if closure > 1e-12 * series.scale().max(f64::MIN_POSITIVE) {
            return Err(TopologyError::InvalidCurve(format!(
                "ρ(-π) and ρ(π) differ by {closure:e}"
            )));
        }
        let mut n = n.max(8);
        loop {
            let samples = (0..n)
                .map(|i| {
                    let k = -PI + 2.0 * PI * i as f64 / n as f64;
                    (k, series.rho(k))
                })
                .collect();
            let curve = Self::from_samples(samples)?;
            if curve.max_step() <= MAX_PHASE_STEP || curve.is_gapless(GAP_RTOL) {
                return Ok(curve);
            }
            if n >= MAX_SAMPLES {
                return Err(TopologyError::Undersampled { samples: n });
            }
            n *= 2;
        }
    }

    /// Builds a curve from samples with strictly increasing `k` in `[-π, π)`.
    pub fn from_samples(samples: Vec<(f64, Complex64)>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(TopologyError::InvalidCurve(
                "need at least 3 samples".into(),
            ));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(TopologyError::InvalidCurve(
                "k must be strictly increasing".into(),
            ));
        }
        let (k0, k1) = (samples[0].0, samples[samples.len() - 1].0);
        if k0 < -PI - 1e-12 || k1 >= PI {
            return Err(TopologyError::InvalidCurve("k must lie in [-π, π)".into()));
        }
        let mut phase = Vec::with_capacity(samples.len());
        let mut prev = -samples[0].1.arg();
        phase.push(prev);
        for (_, z) in &samples[1..] {
            let next = prev + wrap(-z.arg() - prev);
            phase.push(next);
            prev = next;
        }
        let last = *phase.last().unwrap();
        let closing_step = wrap(-samples[0].1.arg() - last);
        Ok(Self {
            samples,
            phase,
            closing_step,
        })
    }

    pub fn samples(&self) -> &[(f64, Complex64)] {
        &self.samples
    }

    /// Unwrapped `φ(k)` at each sample.
    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn min_abs(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, z)| z.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }

    /// Gapless when `min |ρ| ≤ rtol · max |ρ|`.
    pub fn is_gapless(&self, rtol: f64) -> bool {
        self.min_abs() <= rtol * self.max_abs()
    }

    /// Total phase change around the closed loop.
    pub fn total_phase_change(&self) -> f64 {
        self.phase.last().unwrap() - self.phase[0] + self.closing_step
    }

    fn max_step(&self) -> f64 {
        self.phase
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(self.closing_step.abs(), f64::max)
    }
}

/// Maps an angle difference to `(-π, π]`.
pub(crate) fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// `∂φ/∂k` by central differences with one Richardson step
/// (`(4·D(h/2) − D(h))/3`, error `O(h⁴)`), `h = 1e-3`.
pub fn phase_derivative(series: &BlochSeries, k: f64) -> f64 {
    let central = |h: f64| {
        // φ(k+h) − φ(k−h) = −arg(ρ(k+h)/ρ(k−h)) for small h
        let ratio = series.rho(k + h) / series.rho(k - h);
        -ratio.arg() / (2.0 * h)
    };
    let h = 1e-3;
    (4.0 * central(h / 2.0) - central(h)) / 3.0
}
