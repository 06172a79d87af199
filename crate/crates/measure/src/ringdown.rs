//! Synthetic mechanical ringdowns and their exponential fits.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{MeasureError, Result};

/// Sampled mechanical power after the drive is switched off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingdownTrace {
    times: Vec<f64>,
    powers: Vec<f64>,
    /// Damping rate the trace was generated with, when known.
    pub true_gamma: Option<f64>,
    /// Constant background the trace was generated with, when known.
    pub noise_floor: Option<f64>,
}

impl RingdownTrace {
    /// Checks that times increase strictly and powers are finite and
    /// non-negative.
    pub fn new(times: Vec<f64>, powers: Vec<f64>) -> Result<Self> {
        if times.len() != powers.len() {
            return Err(MeasureError::ShapeMismatch(format!(
                "{} times but {} power samples",
                times.len(),
                powers.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MeasureError::InvalidParameter(
                "ringdown times must be finite and strictly increasing".into(),
            ));
        }
        if powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(MeasureError::InvalidParameter(
                "ringdown powers must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            times,
            powers,
            true_gamma: None,
            noise_floor: None,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Amplitude, background and sampling of a simulated ringdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingdownSettings {
    /// Initial power above the floor.
    pub p0: f64,
    /// Constant detector background.
    pub noise_floor: f64,
    /// Standard deviation of the additive Gaussian noise.
    pub noise_sigma: f64,
    /// Trace length in seconds.
    pub duration: f64,
    /// Sample spacing in seconds.
    pub dt: f64,
}

impl RingdownSettings {
    /// Settings covering `decay_constants` power decay times `1/(2πΓ)` with
    /// `samples` points and signal-to-noise ratio `p0/σ = snr`.
    pub fn for_rate(
        gamma: f64,
        decay_constants: f64,
        samples: usize,
        snr: f64,
        floor: f64,
    ) -> Self {
        let duration = decay_constants / (2.0 * PI * gamma);
        Self {
            p0: 1.0,
            noise_floor: floor,
            noise_sigma: if snr.is_infinite() { 0.0 } else { 1.0 / snr },
            duration,
            dt: duration / samples as f64,
        }
    }
}

/// Generates `p(t) = p0·exp(−2πΓt) + floor + noise` at `t = 0, dt, …` up to
/// `duration`. Samples are clipped at zero since a power detector cannot
/// read negative values.
pub fn simulate_ringdown(gamma_eff: f64, s: &RingdownSettings, seed: u64) -> Result<RingdownTrace> {
    if !(gamma_eff.is_finite() && gamma_eff >= 0.0) {
        return Err(MeasureError::InvalidParameter(format!(
            "damping rate must be non-negative, got {gamma_eff}"
        )));
    }
    if !(s.dt > 0.0 && s.duration > 0.0 && s.noise_sigma >= 0.0 && s.p0 >= 0.0) {
        return Err(MeasureError::InvalidParameter(format!(
            "invalid ringdown settings {s:?}"
        )));
    }
    let n = (s.duration / s.dt).floor() as usize + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, s.noise_sigma)
        .map_err(|e| MeasureError::InvalidParameter(e.to_string()))?;
    let times: Vec<f64> = (0..n).map(|j| j as f64 * s.dt).collect();
    let powers = times
        .iter()
        .map(|&t| {
            let p =
                s.p0 * (-2.0 * PI * gamma_eff * t).exp() + s.noise_floor + noise.sample(&mut rng);
            p.max(0.0)
        })
        .collect();
    let mut trace = RingdownTrace::new(times, powers)?;
    trace.true_gamma = Some(gamma_eff);
    trace.noise_floor = Some(s.noise_floor);
    Ok(trace)
}

/// Options for [`fit_ringdown`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Leading fraction of the trace left out of the fit.
    pub transient_fraction: f64,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            transient_fraction: 0.1,
            max_iter: 200,
        }
    }
}

/// Result of an exponential ringdown fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingdownFit {
    /// Damping rate in Hz.
    pub gamma: f64,
    /// One-sigma standard error of `gamma` from the fit covariance.
    pub std_error: f64,
    /// Fitted amplitude at `t = 0`.
    pub p0: f64,
    /// Fitted constant background.
    pub floor: f64,
    pub iterations: usize,
    /// Residual sum of squares.
    pub rss: f64,
}

/// Least-squares fit of `p0·exp(−2πΓt) + N` by Levenberg–Marquardt.
///
/// The first `transient_fraction` of the samples is skipped. Starting values
/// come from a log-linear regression of the samples that stand clearly above
/// the smallest reading. A fitted negative rate is clipped to zero with a
/// warning.
pub fn fit_ringdown(trace: &RingdownTrace, opts: &FitOptions) -> Result<RingdownFit> {
    if trace.len() < 10 {
        return Err(MeasureError::InvalidParameter(format!(
            "a ringdown fit needs at least 10 samples, got {}",
            trace.len()
        )));
    }
    if !(0.0..1.0).contains(&opts.transient_fraction) {
        return Err(MeasureError::InvalidParameter(
            "transient fraction must lie in [0, 1)".into(),
        ));
    }
    let skip = (opts.transient_fraction * trace.len() as f64).ceil() as usize;
    let t0 = trace.times[skip];
    let span = trace.times[trace.len() - 1] - t0;
    // dimensionless time x ∈ [0, 1]; the model is a·exp(−μx) + c
    let x: Vec<f64> = trace.times[skip..]
        .iter()
        .map(|t| (t - t0) / span)
        .collect();
    let y = &trace.powers[skip..];
    if x.len() < 4 {
        return Err(MeasureError::InvalidParameter(
            "fewer than 4 samples remain after the transient window".into(),
        ));
    }

    let (ymin, ymax) = y.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if ymax - ymin <= 1e-12 * ymax.max(f64::MIN_POSITIVE) {
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        return Ok(RingdownFit {
            gamma: 0.0,
            std_error: 0.0,
            p0: 0.0,
            floor: mean,
            iterations: 0,
            rss: 0.0,
        });
    }

    let mut theta = initial_guess(&x, y, ymin, ymax);
    let (mut rss, mut jtj, mut jtr) = normal_equations(&x, y, &theta);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut a = jtj;
        for d in 0..3 {
            a[(d, d)] += lambda * jtj[(d, d)].max(f64::MIN_POSITIVE);
        }
        let Some(step) = a.cholesky().map(|c| c.solve(&jtr)) else {
            lambda *= 10.0;
            continue;
        };
        let trial = theta + step;
        let (trial_rss, trial_jtj, trial_jtr) = normal_equations(&x, y, &trial);
        if trial_rss.is_finite() && trial_rss <= rss {
            let rel_step = (0..3)
                .map(|d| step[d].abs() / (trial[d].abs() + 1e-12 * ymax))
                .fold(0.0, f64::max);
            let small_drop = rss - trial_rss <= 1e-15 * rss;
            theta = trial;
            rss = trial_rss;
            jtj = trial_jtj;
            jtr = trial_jtr;
            lambda = (lambda / 10.0).max(1e-12);
            if rel_step < 1e-12 || small_drop || rss <= 1e-30 * ymax * ymax {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e16 {
                // no descent direction left: the current point is a minimum
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(MeasureError::FitNotConverged {
            iterations,
            step: lambda,
            rss,
        });
    }

    let dof = (x.len() - 3) as f64;
    let sigma2 = rss / dof;
    let var_mu = jtj
        .try_inverse()
        .map(|inv| inv[(1, 1)] * sigma2)
        .unwrap_or(f64::INFINITY);
    let to_hz = 1.0 / (2.0 * PI * span);
    let mut gamma = theta[1] * to_hz;
    if gamma < 0.0 {
        log::warn!("fitted damping rate {gamma:e} Hz is negative; clipping to zero");
        gamma = 0.0;
    }
    Ok(RingdownFit {
        gamma,
        std_error: var_mu.sqrt() * to_hz,
        p0: theta[0] * (theta[1] * t0 / span).exp(),
        floor: theta[2],
        iterations,
        rss,
    })
}

/// `(a, μ, c)` from a straight-line fit of `ln(y − c₀)` against `x`, with
/// `c₀` just below the smallest sample and only samples above 10% of the
/// range used.
fn initial_guess(x: &[f64], y: &[f64], ymin: f64, ymax: f64) -> Vector3<f64> {
    let c0 = ymin - 1e-3 * (ymax - ymin);
    let threshold = 0.1 * (ymax - ymin);
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(_, &v)| v - c0 > threshold)
        .map(|(&xi, &v)| (xi, (v - c0).ln()))
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (xi, li)| (a + xi, b + li));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), (xi, li)| {
        (a + (xi - mx).powi(2), b + (xi - mx) * (li - my))
    });
    let slope = if pts.len() >= 2 && sxx > 0.0 {
        sxy / sxx
    } else {
        -1.0
    };
    let mu = (-slope).max(1e-3);
    Vector3::new((my - slope * mx).exp(), mu, c0)
}

/// Residual sum of squares, `JᵀJ` and `Jᵀr` at `θ = (a, μ, c)`.
fn normal_equations(
    x: &[f64],
    y: &[f64],
    theta: &Vector3<f64>,
) -> (f64, Matrix3<f64>, Vector3<f64>) {
    let (a, mu, c) = (theta[0], theta[1], theta[2]);
    let mut rss = 0.0;
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for (&xi, &yi) in x.iter().zip(y) {
        let e = (-mu * xi).exp();
        let r = yi - (a * e + c);
        let j = Vector3::new(e, -a * xi * e, 1.0);
        rss += r * r;
        jtj += j * j.transpose();
        jtr += j * r;
    }
    (rss, jtj, jtr)
}
