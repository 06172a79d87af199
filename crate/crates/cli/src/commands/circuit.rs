use std::f64::consts::PI;

use omlat_circuit::{
    coupling_rate, dimer_eigenfrequencies, fit_drumhead_radii, infinite_chain_band,
    mutual_for_coupling, passband_edges, CircuitCell,
};
use omlat_core::TopologyKind;
use serde_json::{json, Value};

use super::mean;
use crate::config::Loaded;
use crate::error::{Classify, CliError, CliResult};
use crate::output::{num, Format, Staging, Table};

pub fn circuit(l: &Loaded, out: &Staging, format: Format) -> CliResult<String> {
    let cs = l
        .config
        .circuit
        .as_ref()
        .ok_or_else(|| CliError::config("circuit needs a [circuit] table"))?;
    let spec = &l.spec;
    let fc = match cs.cavity_freq {
        Some(f) => f,
        None if !spec.site_params.is_empty() => mean(&spec.cavity_freqs()),
        None => {
            return Err(CliError::config(
                "circuit.cavity_freq is required without lattice.sites",
            ))
        }
    };
    let cell = CircuitCell::with_frequency(cs.inductance, fc).config()?;
    let c = spec.coupling_params;
    let mut couplings = serde_json::Map::new();
    for (name, j) in [
        ("j", c.j),
        ("jp", c.jp),
        ("j2", c.j2),
        ("j3", c.j3),
        ("j3p", c.j3p),
    ] {
        if j == 0.0 {
            continue;
        }
        let m = mutual_for_coupling(&cell, j).config()?;
        let (lo, hi) = dimer_eigenfrequencies(&cell, m).numerical()?;
        couplings.insert(
            name.into(),
            json!({
                "rate_hz": j,
                "mutual_inductance_h": m,
                "mutual_over_l": m / cs.inductance,
                "dimer_hz": [lo, hi],
                "dimer_splitting_over_2j": (hi - lo) / (2.0 * coupling_rate(&cell, m).numerical()?),
            }),
        );
    }

    let mut report = json!({
        "inductance_h": cell.l,
        "capacitance_f": cell.c,
        "cavity_freq_hz": cell.frequency(),
        "couplings": couplings,
    });
    if spec.topology_kind == TopologyKind::SshChain {
        let m = mutual_for_coupling(&cell, c.j).config()?;
        let mp = mutual_for_coupling(&cell, c.jp).config()?;
        let n = cs.band_points;
        let mut t = Table::new(["beta", "f_minus_hz", "f_plus_hz"]);
        let mut lpb = [f64::INFINITY, f64::NEG_INFINITY];
        let mut upb = lpb;
        for i in 0..n {
            let beta = -PI + 2.0 * PI * i as f64 / (n - 1) as f64;
            let (lo, hi) = infinite_chain_band(beta, &cell, m, mp).numerical()?;
            lpb = [lpb[0].min(lo), lpb[1].max(lo)];
            upb = [upb[0].min(hi), upb[1].max(hi)];
            t.push(vec![num(beta), num(lo), num(hi)]);
        }
        t.write(out, "circuit_band", format)?;
        let cm = passband_edges(fc, c.j, c.jp);
        let deviation = [
            cm.lpb[0] - lpb[0],
            cm.lpb[1] - lpb[1],
            cm.upb[0] - upb[0],
            cm.upb[1] - upb[1],
        ]
        .iter()
        .fold(0.0f64, |a, d| a.max(d.abs()));
        report["passbands"] = json!({
            "coupled_mode": cm,
            "circuit": { "lpb": lpb, "upb": upb },
            "max_deviation_hz": deviation,
            "deviation_over_fc": deviation / fc,
            // the zone-centre edges see both mutuals at once
            "total_m_over_l_squared": ((m + mp) / cs.inductance).powi(2),
        });
    }
    if let Some(d) = &cs.drumhead {
        let freqs: Vec<f64> = spec
            .site_params
            .iter()
            .map(|p| p.mech_freq)
            .collect::<Option<_>>()
            .ok_or_else(|| CliError::config("circuit.drumhead needs lattice.sites.mech_freq"))?;
        let exclude: Vec<usize> = d.exclude_sites.iter().map(|i| i - 1).collect();
        let fit = fit_drumhead_radii(&freqs, d.radius_step, &exclude).numerical()?;
        let radii: Vec<Value> = (0..freqs.len()).map(|i| num(fit.radius(i))).collect();
        report["drumhead"] = json!({
            "fit": fit,
            "radii_m": radii,
            "excluded_sites": d.exclude_sites,
        });
    }
    out.write_json("circuit.json", &report)?;
    Ok(format!(
        "C = {:.4e} F for L = {:e} H at {:.6e} Hz",
        cell.c,
        cell.l,
        cell.frequency()
    ))
}
