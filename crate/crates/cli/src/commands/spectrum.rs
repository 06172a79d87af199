use std::f64::consts::PI;

use omlat_core::{bloch_eigenvalues, diagonalize, participation, LatticeSpec, TopologyKind};
use omlat_topology::{bulk_bands_ssh, exact_gap, GrapheneCouplings};
use serde::Serialize;
use serde_json::json;

use super::{edge_sites, hamiltonian_table, mean, mode_table};
use crate::config::Loaded;
use crate::error::{Classify, CliResult};
use crate::output::{num, Format, Staging, Table};

/// Bulk passbands of the infinite lattice, in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub(crate) struct Passbands {
    pub reference_freq_hz: f64,
    pub lpb: [f64; 2],
    pub upb: [f64; 2],
    /// Open interval between the passbands, absent when they touch.
    pub gap: Option<[f64; 2]>,
}

impl Passbands {
    pub fn in_gap(&self, f: f64) -> bool {
        self.gap.is_some_and(|[lo, hi]| f > lo && f < hi)
    }

    pub fn label(&self, f: f64) -> &'static str {
        let inside = |[lo, hi]: [f64; 2]| f >= lo && f <= hi;
        if self.in_gap(f) {
            "gap"
        } else if inside(self.lpb) {
            "lpb"
        } else if inside(self.upb) {
            "upb"
        } else {
            "outside"
        }
    }
}

/// Passbands around the mean cavity frequency. Chains sample
/// `ε(k) ∓ |ρ(k)|` over `n` wavenumbers; flakes use the exact
/// strained-graphene bulk without the second-neighbour shift.
pub(crate) fn passbands(spec: &LatticeSpec, n: usize) -> Passbands {
    let w = mean(&spec.cavity_freqs());
    let (lpb, upb) = match spec.topology_kind {
        TopologyKind::SshChain => {
            let c = spec.coupling_params.ssh();
            let mut lpb = [f64::INFINITY, f64::NEG_INFINITY];
            let mut upb = lpb;
            for i in 0..n {
                let k = -PI + 2.0 * PI * i as f64 / n as f64;
                let (lo, hi) = bulk_bands_ssh(k, &c);
                lpb = [lpb[0].min(lo), lpb[1].max(lo)];
                upb = [upb[0].min(hi), upb[1].max(hi)];
            }
            (lpb, upb)
        }
        _ => {
            let c = spec.coupling_params;
            let half_gap = 0.5 * exact_gap(&GrapheneCouplings::strained(c.j, c.jp));
            let top = c.j + 2.0 * c.jp;
            ([-top, -half_gap], [half_gap, top])
        }
    };
    let lpb = [w + lpb[0], w + lpb[1]];
    let upb = [w + upb[0], w + upb[1]];
    Passbands {
        reference_freq_hz: w,
        lpb,
        upb,
        gap: (lpb[1] < upb[0]).then_some([lpb[1], upb[0]]),
    }
}

pub fn spectrum(l: &Loaded, out: &Staging, format: Format) -> CliResult<String> {
    let spec = &l.spec;
    if spec.topology_kind == TopologyKind::RibbonUnitCell {
        return ribbon_spectrum(l, out, format);
    }
    let h = spec.coupling_hamiltonian().config()?;
    let modes = diagonalize(&h).numerical()?;
    let eta = participation(&modes);
    let bands = passbands(spec, l.config.topology.band_points.max(512));
    let edges = edge_sites(spec);

    let mut t = Table::new(["mode", "eigenfreq_hz", "band", "mid_gap", "edge_weight"]);
    let mut mid_gap = Vec::new();
    for (k, &f) in modes.eigenfreqs().iter().enumerate() {
        let w: f64 = edges.iter().map(|&i| eta.get(k, i)).sum();
        if bands.in_gap(f) {
            mid_gap.push(k + 1);
        }
        t.push(vec![
            (k + 1).into(),
            num(f),
            bands.label(f).into(),
            bands.in_gap(f).into(),
            num(w),
        ]);
    }
    t.write(out, "eigenfreqs", format)?;
    mode_table(&modes, h.site_labels(), modes.modeshapes()).write(out, "modeshapes", format)?;
    mode_table(&modes, h.site_labels(), eta.eta()).write(out, "participation", format)?;
    hamiltonian_table(&h).write(out, "hamiltonian", format)?;
    out.write_json(
        "passbands.json",
        &json!({
            "passbands": bands,
            "edge_sites": edges.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "mid_gap_modes": mid_gap,
        }),
    )?;
    Ok(format!(
        "{} modes, {} in the bulk gap",
        modes.dim(),
        mid_gap.len()
    ))
}

/// Band energies of a ribbon unit cell at its configured wavenumber.
fn ribbon_spectrum(l: &Loaded, out: &Staging, format: Format) -> CliResult<String> {
    let h = l.spec.ribbon_hamiltonian().config()?;
    let e = bloch_eigenvalues(&h).numerical()?;
    let tol = l.config.topology.zero_tol * l.spec.coupling_params.j.max(l.spec.coupling_params.jp);
    let mut t = Table::new(["band", "energy_hz", "zero_mode"]);
    for (k, &x) in e.iter().enumerate() {
        t.push(vec![(k + 1).into(), num(x), (x.abs() < tol).into()]);
    }
    t.write(out, "eigenfreqs", format)?;
    let zero = e.iter().filter(|x| x.abs() < tol).count();
    Ok(format!(
        "{} bands at k_par = {}, {zero} near zero",
        e.len(),
        h.k_par()
    ))
}
