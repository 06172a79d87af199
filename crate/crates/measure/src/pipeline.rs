//! Simulated power-sweep measurements over every (mode, site) pair and the
//! recovery of the Hamiltonian from them.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use omlat_core::{
    derive_seed, diagonalize, io::write_hamiltonian_csv, orthogonality_defect, participation,
    CouplingHamiltonian, ModeSet, ParticipationMatrix,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::damping::{damping_slope, unnormalized_eta, DampingConfig};
use crate::error::{MeasureError, Result};
use crate::recover::{
    assign_signs, orthogonalize_gauged, reconstruct_hamiltonian, relative_g0,
    ReconstructedHamiltonian,
};
use crate::ringdown::{
    fit_ringdown, simulate_ringdown, FitOptions, RingdownSettings, RingdownTrace,
};
use crate::sinkhorn::{sinkhorn_normalize, SinkhornOptions};

/// Ground truth of a simulated device. Frequencies and rates in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceModel {
    pub hamiltonian: CouplingHamiltonian,
    /// Per site.
    pub g0: Vec<f64>,
    /// Per site.
    pub omega_m: Vec<f64>,
    /// Per site.
    pub gamma_m: Vec<f64>,
    /// Per collective mode in ascending frequency order.
    pub kappa_tot: Vec<f64>,
    pub kappa_1: Vec<f64>,
    pub kappa_2: Vec<f64>,
    pub transmittance: Vec<f64>,
}

impl DeviceModel {
    pub fn validate(&self) -> Result<()> {
        let n = self.hamiltonian.dim();
        let lists = [
            ("g0", &self.g0),
            ("omega_m", &self.omega_m),
            ("gamma_m", &self.gamma_m),
            ("kappa_tot", &self.kappa_tot),
            ("kappa_1", &self.kappa_1),
            ("kappa_2", &self.kappa_2),
            ("transmittance", &self.transmittance),
        ];
        for (name, v) in lists {
            if v.len() != n {
                return Err(MeasureError::ShapeMismatch(format!(
                    "{name} has {} entries for {n} sites",
                    v.len()
                )));
            }
        }
        for k in 0..n {
            for i in 0..n {
                self.config(k, i).validate()?;
            }
        }
        Ok(())
    }

    /// Damping configuration for mode `k` probed at site `i`, driven on the
    /// red mechanical sideband (`Δ = Ω_m,i`) with zero flux.
    pub fn config(&self, k: usize, i: usize) -> DampingConfig {
        DampingConfig {
            detuning: self.omega_m[i],
            kappa_tot: self.kappa_tot[k],
            kappa_1: self.kappa_1[k],
            kappa_2: self.kappa_2[k],
            drive_flux: 0.0,
            transmittance: self.transmittance[k],
            gamma_m: self.gamma_m[i],
            omega_m: self.omega_m[i],
            g0: self.g0[i],
        }
    }
}

/// How damping rates are obtained at each drive flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseModel {
    /// Exact damping rates, no ringdowns.
    Analytic {},
    /// Simulated and fitted ringdowns.
    Ringdown {
        /// `p0/σ` of each trace.
        snr: f64,
        /// Trace length in power decay times.
        decay_constants: f64,
        samples: usize,
        /// Background relative to `p0`.
        noise_floor: f64,
        transient_fraction: f64,
    },
}

/// Drive fluxes and noise model of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    /// Photon fluxes in photons per second.
    pub drive_fluxes: Vec<f64>,
    pub noise: NoiseModel,
}

/// Fitted sweep for one (mode, site) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub mode: usize,
    pub site: usize,
    pub config: DampingConfig,
    /// Ringdown seeds, one per drive flux. Empty for analytic sweeps.
    pub seeds: Vec<u64>,
    /// Measured total damping rate per drive flux in Hz.
    pub gammas: Vec<f64>,
    /// Standard error per rate; zero for analytic sweeps.
    pub std_errors: Vec<f64>,
    /// `∂Γ_eff/∂ṅ_d` in Hz·s, clipped at zero.
    pub slope: f64,
    pub eta_tilde: f64,
    /// Trace file relative to the dataset directory.
    pub trace_file: Option<String>,
}

/// A full simulated measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDataset {
    pub n_sites: usize,
    /// Measured collective-mode frequencies in Hz, one per row.
    pub eigenfreqs: Vec<f64>,
    pub master_seed: u64,
    pub sweep: SweepSettings,
    /// Row-major over (mode, site).
    pub points: Vec<PointRecord>,
    /// Traces per point, kept only when requested.
    #[serde(skip)]
    pub traces: Vec<Vec<RingdownTrace>>,
}

impl MeasurementDataset {
    /// The unnormalized participation matrix, mode `k` in row `k`.
    pub fn eta_tilde(&self) -> DMatrix<f64> {
        let n = self.n_sites;
        DMatrix::from_fn(n, n, |k, i| self.points[k * n + i].eta_tilde)
    }

    /// Writes `manifest.json` and, when traces are held, one CSV per point
    /// under `traces/`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut manifest = self.clone();
        manifest.traces.clear();
        if !self.traces.is_empty() {
            fs::create_dir_all(dir.join("traces"))?;
            for (p, traces) in manifest.points.iter_mut().zip(&self.traces) {
                let name = format!("traces/mode{:02}_site{:02}.csv", p.mode + 1, p.site + 1);
                let mut w = csv::Writer::from_path(dir.join(&name))?;
                w.write_record(["power_index", "drive_flux", "time_s", "power"])?;
                for (j, t) in traces.iter().enumerate() {
                    let flux = self.sweep.drive_fluxes[j];
                    for (time, power) in t.times().iter().zip(t.powers()) {
                        w.serialize((j, flux, time, power))?;
                    }
                }
                w.flush()?;
                p.trace_file = Some(name);
            }
        }
        let f = fs::File::create(dir.join("manifest.json"))?;
        serde_json::to_writer_pretty(f, &manifest)?;
        Ok(())
    }

    /// Reads a dataset written by [`save`](Self::save). When trace files
    /// are present, every ringdown is fitted again and the slopes and
    /// unnormalized ratios are recomputed from the traces.
    pub fn load(dir: &Path) -> Result<Self> {
        let f = fs::File::open(dir.join("manifest.json"))?;
        let mut ds: Self = serde_json::from_reader(f)?;
        if ds.points.len() != ds.n_sites * ds.n_sites || ds.eigenfreqs.len() != ds.n_sites {
            return Err(MeasureError::ShapeMismatch(format!(
                "manifest holds {} points and {} frequencies for {} sites",
                ds.points.len(),
                ds.eigenfreqs.len(),
                ds.n_sites
            )));
        }
        let NoiseModel::Ringdown {
            transient_fraction, ..
        } = ds.sweep.noise
        else {
            return Ok(ds);
        };
        let opts = FitOptions {
            transient_fraction,
            ..Default::default()
        };
        let n_flux = ds.sweep.drive_fluxes.len();
        let mut all = Vec::with_capacity(ds.points.len());
        for p in &mut ds.points {
            let Some(name) = &p.trace_file else {
                continue;
            };
            let traces = read_traces(&dir.join(name), n_flux)?;
            let fits = traces
                .iter()
                .map(|t| fit_ringdown(t, &opts))
                .collect::<Result<Vec<_>>>()?;
            p.gammas = fits.iter().map(|f| f.gamma).collect();
            p.std_errors = fits.iter().map(|f| f.std_error).collect();
            p.slope = fit_slope(&ds.sweep.drive_fluxes, &p.gammas).max(0.0);
            p.eta_tilde = unnormalized_eta(p.slope, &p.config)?;
            all.push(traces);
        }
        if all.len() == ds.points.len() {
            ds.traces = all;
        }
        Ok(ds)
    }
}

fn read_traces(path: &Path, n_flux: usize) -> Result<Vec<RingdownTrace>> {
    let mut cols: Vec<(Vec<f64>, Vec<f64>)> = vec![(Vec::new(), Vec::new()); n_flux];
    let mut r = csv::Reader::from_path(path)?;
    for row in r.deserialize() {
        let (j, _flux, t, p): (usize, f64, f64, f64) = row?;
        let slot = cols.get_mut(j).ok_or_else(|| {
            MeasureError::ShapeMismatch(format!("{}: power index {j} out of range", path.display()))
        })?;
        slot.0.push(t);
        slot.1.push(p);
    }
    cols.into_iter()
        .map(|(t, p)| RingdownTrace::new(t, p))
        .collect()
}

/// Ordinary least-squares slope of `y` against `x` with free intercept.
fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Simulates the power sweep for every (mode, site) pair. Each ringdown has
/// its own seed derived from `(master_seed, mode, site, flux index)`, so the
/// result does not depend on scheduling.
pub fn simulate_measurement(
    model: &DeviceModel,
    sweep: &SweepSettings,
    master_seed: u64,
    keep_traces: bool,
) -> Result<MeasurementDataset> {
    model.validate()?;
    if sweep.drive_fluxes.len() < 2
        || sweep
            .drive_fluxes
            .iter()
            .any(|f| !(f.is_finite() && *f >= 0.0))
    {
        return Err(MeasureError::InvalidParameter(
            "a sweep needs at least two finite, non-negative drive fluxes".into(),
        ));
    }
    let modes = diagonalize(&model.hamiltonian)?;
    let eta = participation(&modes);
    let n = model.hamiltonian.dim();
    let results: Vec<(PointRecord, Vec<RingdownTrace>)> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            simulate_point(
                model,
                sweep,
                &eta,
                idx / n,
                idx % n,
                master_seed,
                keep_traces,
            )
        })
        .collect::<Result<_>>()?;
    let (points, traces): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(MeasurementDataset {
        n_sites: n,
        eigenfreqs: modes.eigenfreqs().to_vec(),
        master_seed,
        sweep: sweep.clone(),
        points,
        traces: if keep_traces { traces } else { Vec::new() },
    })
}

fn simulate_point(
    model: &DeviceModel,
    sweep: &SweepSettings,
    eta: &ParticipationMatrix,
    k: usize,
    i: usize,
    master_seed: u64,
    keep_traces: bool,
) -> Result<(PointRecord, Vec<RingdownTrace>)> {
    let config = model.config(k, i);
    let true_slope = damping_slope(&config, eta.get(k, i));
    let exact: Vec<f64> = sweep
        .drive_fluxes
        .iter()
        .map(|f| config.gamma_m + f * true_slope)
        .collect();
    let mut seeds = Vec::new();
    let mut traces = Vec::new();
    let (gammas, std_errors) = match sweep.noise {
        NoiseModel::Analytic {} => (exact.clone(), vec![0.0; exact.len()]),
        NoiseModel::Ringdown {
            snr,
            decay_constants,
            samples,
            noise_floor,
            transient_fraction,
        } => {
            let opts = FitOptions {
                transient_fraction,
                ..Default::default()
            };
            let mut g = Vec::with_capacity(exact.len());
            let mut e = Vec::with_capacity(exact.len());
            for (j, &gamma) in exact.iter().enumerate() {
                let seed = derive_seed(master_seed, &[k as u64, i as u64, j as u64]);
                let settings =
                    RingdownSettings::for_rate(gamma, decay_constants, samples, snr, noise_floor);
                let trace = simulate_ringdown(gamma, &settings, seed)?;
                let fit = fit_ringdown(&trace, &opts)?;
                seeds.push(seed);
                g.push(fit.gamma);
                e.push(fit.std_error);
                if keep_traces {
                    traces.push(trace);
                }
            }
            (g, e)
        }
    };
    let raw_slope = fit_slope(&sweep.drive_fluxes, &gammas);
    if raw_slope < 0.0 {
        log::debug!("mode {k} site {i}: negative damping slope {raw_slope:e} clipped to zero");
    }
    let slope = raw_slope.max(0.0);
    let record = PointRecord {
        mode: k,
        site: i,
        config,
        seeds,
        gammas,
        std_errors,
        slope,
        eta_tilde: unnormalized_eta(slope, &config)?,
        trace_file: None,
    };
    Ok((record, traces))
}

/// Diagnostics of a recovery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Final row or column sum deviation of `η̂`.
    pub sinkhorn: f64,
    /// `max |ŨŨᵀ − I|` before orthogonalization.
    pub orthogonality_before: f64,
    /// `max |UUᵀ − I|` after orthogonalization.
    pub orthogonality_after: f64,
}

/// Everything recovered from one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub eta_hat: ParticipationMatrix,
    /// Sign-assigned, unorthogonalized modeshapes.
    pub u_tilde: DMatrix<f64>,
    pub u_hat: DMatrix<f64>,
    pub h_hat: ReconstructedHamiltonian,
    /// Normalization steps used.
    pub iterations_used: usize,
    pub residuals: Residuals,
    /// Entries raised to the normalization floor.
    pub floored: Vec<(usize, usize)>,
    /// Relative single-photon couplings from all modes.
    pub g0_relative: Vec<f64>,
}

impl RecoveryResult {
    /// Writes `h_hat.csv` (rotating frame, Hz) and `report.json`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_hamiltonian_csv(
            &self.h_hat.hamiltonian,
            fs::File::create(dir.join("h_hat.csv"))?,
        )?;
        let report = serde_json::json!({
            "mean_frequency_hz": self.h_hat.mean_frequency,
            "iterations_used": self.iterations_used,
            "residuals": self.residuals,
            "floored_entries": self.floored,
            "g0_relative": self.g0_relative,
            "eta_hat": rows(self.eta_hat.eta()),
            "u_hat": rows(&self.u_hat),
        });
        serde_json::to_writer_pretty(fs::File::create(dir.join("report.json"))?, &report)?;
        Ok(())
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Normalizes, signs, orthogonalizes and reconstructs. `reference` is the
/// theory model of the same lattice and only supplies modeshape signs.
pub fn recover(
    dataset: &MeasurementDataset,
    reference: &ModeSet,
    opts: &SinkhornOptions,
) -> Result<RecoveryResult> {
    let eta_tilde = dataset.eta_tilde();
    let norm = sinkhorn_normalize(&eta_tilde, opts)?;
    let u_tilde = assign_signs(&norm.eta, &dataset.eigenfreqs, reference)?;
    let u_hat = orthogonalize_gauged(&u_tilde)?;
    let h_hat = reconstruct_hamiltonian(&u_hat, &dataset.eigenfreqs)?;
    let g0_relative = relative_g0(&eta_tilde, &norm.eta, None)?;
    Ok(RecoveryResult {
        residuals: Residuals {
            sinkhorn: norm.residual,
            orthogonality_before: orthogonality_defect(&u_tilde),
            orthogonality_after: orthogonality_defect(&u_hat),
        },
        eta_hat: norm.eta,
        u_tilde,
        u_hat,
        h_hat,
        iterations_used: norm.iterations,
        floored: norm.floored,
        g0_relative,
    })
}
