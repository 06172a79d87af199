//! Monte-Carlo ensembles over cavity-frequency disorder.

use std::io::Write;

use omlat_core::{
    apply_disorder, derive_seed, diagonalize, participation, LatticeSpec, TopologyKind,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DisorderError, Result};
use crate::hybridization::hybridization_factor;

/// Largest tolerated fraction of failed eigensolves per ensemble.
pub const FAILURE_BUDGET: f64 = 1e-3;

/// Statistics at one disorder strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaPoint {
    /// Relative standard deviation of the cavity frequencies.
    pub sigma: f64,
    pub zeta_mean: f64,
    /// Standard error of `zeta_mean`.
    pub zeta_sem: f64,
    pub zeta_p5: f64,
    pub zeta_p15: f64,
    pub zeta_p85: f64,
    pub zeta_p95: f64,
    /// Mean eigenfrequency per mode in Hz, ascending order.
    pub eigen_mean: Vec<f64>,
    /// Standard deviation per mode in Hz.
    pub eigen_std: Vec<f64>,
    /// Samples whose eigensolve failed.
    pub failures: usize,
    /// Samples whose rank-selected mid-gap pair is no longer separated from
    /// the neighbouring modes, so ζ is taken from overlapping bands.
    pub rank_flagged: usize,
    /// Sorted ζ samples.
    #[serde(skip)]
    pub zeta_sorted: Vec<f64>,
}

impl SigmaPoint {
    /// Central band holding `confidence` of the samples.
    pub fn band(&self, confidence: f64) -> (f64, f64) {
        let tail = 0.5 * (1.0 - confidence);
        (
            percentile(&self.zeta_sorted, tail),
            percentile(&self.zeta_sorted, 1.0 - tail),
        )
    }
}

/// Ensemble statistics over a grid of disorder strengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub points: Vec<SigmaPoint>,
    pub samples_per_point: usize,
    pub master_seed: u64,
    pub n_cells: usize,
}

impl EnsembleResult {
    pub fn sigma_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.sigma).collect()
    }

    /// `sigma, mean, p5, p15, p85, p95` per grid point.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["sigma", "mean", "p5", "p15", "p85", "p95"])?;
        for p in &self.points {
            w.serialize((
                p.sigma,
                p.zeta_mean,
                p.zeta_p5,
                p.zeta_p15,
                p.zeta_p85,
                p.zeta_p95,
            ))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Seeds, counts and per-point statistics.
    pub fn manifest_json(&self) -> serde_json::Value {
        serde_json::json!({
            "master_seed": self.master_seed,
            "samples_per_point": self.samples_per_point,
            "n_cells": self.n_cells,
            "seed_rule": "derive_seed(master_seed, [sigma_index, sample_index])",
            "points": self.points,
        })
    }
}

/// Linear interpolation between order statistics (`q ∈ [0, 1]`).
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

struct Sample {
    zeta: f64,
    eigenfreqs: Vec<f64>,
    flagged: bool,
}

fn one_sample(
    h: &omlat_core::CouplingHamiltonian,
    n_cells: usize,
    sigma: f64,
    seed: u64,
) -> Option<Sample> {
    let disordered = apply_disorder(h, sigma, seed).ok()?;
    let modes = diagonalize(&disordered).ok()?;
    let zeta = hybridization_factor(&participation(&modes), n_cells).ok()?;
    let w = modes.eigenfreqs();
    let (lo, hi) = (n_cells - 1, n_cells);
    let pair = w[hi] - w[lo];
    let below = if lo > 0 {
        w[lo] - w[lo - 1]
    } else {
        f64::INFINITY
    };
    let above = if hi + 1 < w.len() {
        w[hi + 1] - w[hi]
    } else {
        f64::INFINITY
    };
    Some(Sample {
        zeta,
        eigenfreqs: w.to_vec(),
        flagged: pair > below.min(above),
    })
}

/// Draws `samples` disordered copies of the chain at every `sigma` and
/// collects ζ and eigenfrequency statistics.
///
/// Sample `s` at grid index `g` uses seed `derive_seed(master_seed, [g, s])`
/// and samples are sorted before aggregation, so the result is bit-identical
/// for any thread schedule.
pub fn run_ensemble(
    spec: &LatticeSpec,
    sigma_grid: &[f64],
    samples: usize,
    master_seed: u64,
) -> Result<EnsembleResult> {
    if spec.topology_kind != TopologyKind::SshChain {
        return Err(DisorderError::InvalidParameter(
            "the hybridization factor is defined for SSH chains".into(),
        ));
    }
    if samples == 0 {
        return Err(DisorderError::InvalidParameter(
            "samples must be positive".into(),
        ));
    }
    if samples < 100 {
        log::warn!("{samples} samples per point is too few for reliable percentiles");
    }
    if let Some(s) = sigma_grid.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(DisorderError::InvalidParameter(format!(
            "invalid sigma {s}"
        )));
    }
    let h = spec.coupling_hamiltonian()?;
    let n_cells = spec.n_cells();
    let mut points = Vec::with_capacity(sigma_grid.len());
    let mut failed = 0;
    for (g, &sigma) in sigma_grid.iter().enumerate() {
        let draws: Vec<Option<Sample>> = (0..samples)
            .into_par_iter()
            .map(|s| {
                one_sample(
                    &h,
                    n_cells,
                    sigma,
                    derive_seed(master_seed, &[g as u64, s as u64]),
                )
            })
            .collect();
        let good: Vec<Sample> = draws.into_iter().flatten().collect();
        let failures = samples - good.len();
        failed += failures;
        if good.is_empty() {
            return Err(DisorderError::TooManyFailures {
                failed: samples,
                total: samples,
            });
        }
        points.push(aggregate(sigma, &good, failures));
    }
    let total = samples * sigma_grid.len();
    if failed as f64 > FAILURE_BUDGET * total as f64 {
        return Err(DisorderError::TooManyFailures { failed, total });
    }
    Ok(EnsembleResult {
        points,
        samples_per_point: samples,
        master_seed,
        n_cells,
    })
}

fn aggregate(sigma: f64, good: &[Sample], failures: usize) -> SigmaPoint {
    let m = good.len() as f64;
    let mut zeta: Vec<f64> = good.iter().map(|s| s.zeta).collect();
    zeta.sort_by(f64::total_cmp);
    // sorted before summing so the mean does not depend on arrival order
    let mean = zeta.iter().sum::<f64>() / m;
    let var = if good.len() > 1 {
        zeta.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    let n = good[0].eigenfreqs.len();
    let mut eigen_mean = vec![0.0; n];
    let mut eigen_std = vec![0.0; n];
    for k in 0..n {
        let mut col: Vec<f64> = good.iter().map(|s| s.eigenfreqs[k]).collect();
        col.sort_by(f64::total_cmp);
        let mu = col.iter().sum::<f64>() / m;
        eigen_mean[k] = mu;
        eigen_std[k] = (col.iter().map(|w| (w - mu).powi(2)).sum::<f64>() / m).sqrt();
    }
    SigmaPoint {
        sigma,
        zeta_mean: mean,
        zeta_sem: (var / m).sqrt(),
        zeta_p5: percentile(&zeta, 0.05),
        zeta_p15: percentile(&zeta, 0.15),
        zeta_p85: percentile(&zeta, 0.85),
        zeta_p95: percentile(&zeta, 0.95),
        eigen_mean,
        eigen_std,
        failures,
        rank_flagged: good.iter().filter(|s| s.flagged).count(),
        zeta_sorted: zeta,
    }
}
