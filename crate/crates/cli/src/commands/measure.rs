use omlat_core::{apply_disorder, derive_seed, SiteParams};
use omlat_measure::{simulate_measurement, DeviceModel, NoiseModel, SweepSettings};
use serde_json::json;

use super::{hamiltonian_table, mean};
use crate::config::Loaded;
use crate::error::{Classify, CliError, CliResult};
use crate::output::{Format, Staging};

/// Name of the ground-truth Hamiltonian written next to a dataset.
pub(crate) const GROUND_TRUTH: &str = "ground_truth_hamiltonian";

/// Stream index of the device disorder draw; measurement noise uses
/// three-index seeds, so the two never collide.
const DEVICE_STREAM: u64 = 0;

pub fn measure_sim(l: &Loaded, out: &Staging, seed: u64) -> CliResult<String> {
    l.require_chain("measure-sim")?;
    let m = l
        .config
        .measure
        .as_ref()
        .ok_or_else(|| CliError::config("measure-sim needs a [measure] table"))?;
    let n = l.spec.n_sites;
    let site = |name: &str, get: fn(&SiteParams) -> Option<f64>| -> CliResult<Vec<f64>> {
        l.spec
            .site_params
            .iter()
            .map(get)
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| CliError::config(format!("measure-sim needs lattice.sites.{name}")))
    };
    let design = l.spec.coupling_hamiltonian().config()?;
    let truth = if m.cavity_disorder > 0.0 {
        apply_disorder(
            &design,
            m.cavity_disorder,
            derive_seed(seed, &[DEVICE_STREAM]),
        )
        .config()?
    } else {
        design
    };
    let model = DeviceModel {
        hamiltonian: truth.clone(),
        g0: site("g0", |p| p.g0)?,
        omega_m: site("mech_freq", |p| p.mech_freq)?,
        gamma_m: site("mech_linewidth", |p| p.mech_linewidth)?,
        kappa_tot: m.kappa_tot.expand(n, "kappa_tot")?,
        kappa_1: m.kappa_1.expand(n, "kappa_1")?,
        kappa_2: m.kappa_2.expand(n, "kappa_2")?,
        transmittance: m.transmittance.expand(n, "transmittance")?,
    };
    model.validate().config()?;
    let sweep = SweepSettings {
        drive_fluxes: m.drive_fluxes.clone(),
        noise: m.noise,
    };
    let keep = m.keep_traces && matches!(m.noise, NoiseModel::Ringdown { .. });
    let ds = simulate_measurement(&model, &sweep, seed, keep).numerical()?;
    ds.save(out.dir()).io()?;
    // recovery reads the ground truth back as CSV whatever the table format
    hamiltonian_table(&truth).write(out, GROUND_TRUTH, Format::Csv)?;
    out.write_json(
        "ground_truth.json",
        &json!({
            "cavity_disorder": m.cavity_disorder,
            "device_seed": derive_seed(seed, &[DEVICE_STREAM]),
            "mean_cavity_freq_hz": mean(&truth.diagonal()),
        }),
    )?;
    Ok(format!(
        "{} (mode, site) sweeps of {} drive powers, master seed {seed}",
        ds.points.len(),
        sweep.drive_fluxes.len()
    ))
}
