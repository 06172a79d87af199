use std::f64::consts::PI;

use omlat_core::{
    bloch_eigenvalues, build_ribbon_hamiltonian, diagonalize, RibbonOrientation, TopologyKind,
};
use omlat_topology::{
    band_table, exact_gap, min_gap_bz, ribbon_edge_prediction, winding_number, zak_phase,
    BulkCurve, EdgePrediction, GrapheneCouplings, GAP_RTOL,
};
use serde_json::{json, Value};

use super::spectrum::passbands;
use crate::config::Loaded;
use crate::error::{Classify, CliResult};
use crate::output::{num, Format, Staging, Table};

/// Ribbon widths whose unit cells match the 24-site flake.
const FLAKE_RIBBONS: [(RibbonOrientation, usize); 2] = [
    (RibbonOrientation::ZigZag, 4),
    (RibbonOrientation::TiltedArmchair, 7),
];

pub fn topology(l: &Loaded, out: &Staging, format: Format) -> CliResult<String> {
    match l.spec.topology_kind {
        TopologyKind::SshChain => chain(l, out, format),
        TopologyKind::HoneycombFlake => flake(l, out, format),
        TopologyKind::RibbonUnitCell => ribbon(l, out, format),
    }
}

fn chain(l: &Loaded, out: &Staging, format: Format) -> CliResult<String> {
    let spec = &l.spec;
    let c = spec.coupling_params.ssh();
    let series = c.bloch_series();
    let curve = BulkCurve::sample(&series, l.config.topology.bz_samples).numerical()?;
    let gapless = curve.is_gapless(GAP_RTOL);
    let (winding, zak, prediction) = if gapless {
        (None, None, None)
    } else {
        let w = winding_number(&curve).numerical()?;
        // windings of 2 or more are outside the two-band classification
        let z = zak_phase(&curve).ok();
        let p = omlat_topology::edge_prediction(&series, spec.n_cells()).ok();
        (Some(w), z, p)
    };

    let h = spec.coupling_hamiltonian().config()?;
    let modes = diagonalize(&h).numerical()?;
    let bands = passbands(spec, l.config.topology.band_points.max(512));
    let in_gap: Vec<usize> = (0..modes.dim())
        .filter(|&k| bands.in_gap(modes.eigenfreqs()[k]))
        .map(|k| k + 1)
        .collect();

    let mut t = Table::new(["k", "re_rho_hz", "im_rho_hz", "e_minus_hz", "e_plus_hz"]);
    for r in band_table(&c, l.config.topology.band_points) {
        t.push(vec![
            num(r.k),
            num(r.re_rho),
            num(r.im_rho),
            num(r.e_minus),
            num(r.e_plus),
        ]);
    }
    t.write(out, "bands", format)?;
    out.write_json(
        "report.json",
        &json!({
            "kind": "ssh_chain",
            "n_cells": spec.n_cells(),
            "gapless": gapless,
            "min_abs_rho_hz": curve.min_abs(),
            "winding": winding,
            "zak_phase": zak.map(|z| z.value()),
            "prediction": prediction,
            "finite_chain": {
                "passbands": bands,
                "modes_in_gap": in_gap,
            },
        }),
    )?;
    let w = winding.map_or("none (gapless)".to_string(), |w| w.to_string());
    let edges = prediction.as_ref().is_some_and(|p| p.edge_states_exist);
    Ok(format!(
        "winding {w}, edge states predicted: {edges}, modes in gap: {}",
        in_gap.len()
    ))
}

fn flake(l: &Loaded, out: &Staging, format: Format) -> CliResult<String> {
    let c = l.spec.coupling_params;
    let g = GrapheneCouplings::strained(c.j, c.jp);
    let grid = l.config.topology.graphene_grid;
    let gap = min_gap_bz(&g, grid);
    let ribbon_couplings = c.ribbon();
    let mut t = prediction_table();
    let mut summary = Vec::new();
    for (o, width) in FLAKE_RIBBONS {
        let n = l.config.topology.ribbon_k_points;
        let mut predicted = 0;
        for k in k_grid(n) {
            let p = ribbon_edge_prediction(o, k, width, &ribbon_couplings).ok();
            predicted += usize::from(p.as_ref().is_some_and(|p| p.edge_states_exist));
            t.push(prediction_row(o, width, k, p.as_ref(), Vec::new()));
        }
        summary.push(json!({
            "orientation": o,
            "width": width,
            "k_points": n,
            "fraction_with_edge_states": predicted as f64 / n as f64,
        }));
    }
    t.write(out, "ribbon_predictions", format)?;
    let exact = exact_gap(&g);
    out.write_json(
        "report.json",
        &json!({
            "kind": "honeycomb_flake",
            "ratio": c.jp / c.j,
            "grid": grid,
            "min_gap_grid_hz": gap,
            "min_gap_exact_hz": exact,
            "bulk_gapped": exact > 0.0,
            "ribbons": summary,
        }),
    )?;
    Ok(format!(
        "J'/J = {:.3}, bulk gap {exact:.6e} Hz ({gap:.6e} Hz on the {grid}² grid)",
        c.jp / c.j
    ))
}

fn ribbon(l: &Loaded, out: &Staging, format: Format) -> CliResult<String> {
    let geom = l.spec.ribbon.expect("ribbon specs carry their geometry");
    let c = l.spec.coupling_params.ribbon();
    let n = l.config.topology.ribbon_k_points;
    let tol = l.config.topology.zero_tol * c.j.max(c.jp);
    let mut t = prediction_table();
    t.columns.push("zero_modes".into());
    t.columns
        .extend((1..=2 * geom.width).map(|b| format!("e{b}_hz")));
    let (mut agree, mut with_zero) = (0, 0);
    for k in k_grid(n) {
        let p = ribbon_edge_prediction(geom.orientation, k, geom.width, &c).ok();
        let e = bloch_eigenvalues(
            &build_ribbon_hamiltonian(geom.orientation, geom.width, k, &c).config()?,
        )
        .numerical()?;
        let zero = e.iter().filter(|x| x.abs() < tol).count();
        with_zero += usize::from(zero > 0);
        let predicted = p.as_ref().is_some_and(|p| p.edge_states_exist);
        agree += usize::from(predicted == (zero > 0));
        let mut extra = vec![zero.into()];
        extra.extend(e.iter().map(|x| num(*x)));
        t.push(prediction_row(
            geom.orientation,
            geom.width,
            k,
            p.as_ref(),
            extra,
        ));
    }
    t.write(out, "ribbon_scan", format)?;
    out.write_json(
        "report.json",
        &json!({
            "kind": "ribbon_unit_cell",
            "orientation": geom.orientation,
            "width": geom.width,
            "k_points": n,
            "zero_tol_hz": tol,
            "k_with_zero_modes": with_zero,
            "prediction_agrees": agree,
        }),
    )?;
    Ok(format!(
        "{with_zero} of {n} wavenumbers carry zero modes; prediction agrees at {agree}"
    ))
}

/// `k_i = -π + 2πi/n`.
fn k_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| -PI + 2.0 * PI * i as f64 / n as f64)
}

fn prediction_table() -> Table {
    Table::new([
        "orientation",
        "width",
        "k_par",
        "winding",
        "zak_phase",
        "slope",
        "slope_bound",
        "edge_states_predicted",
        "marginal",
    ])
}

fn prediction_row(
    o: RibbonOrientation,
    width: usize,
    k: f64,
    p: Option<&EdgePrediction>,
    extra: Vec<Value>,
) -> Vec<Value> {
    let name = serde_json::to_value(o).expect("orientation serializes");
    let mut row = vec![name, width.into(), num(k)];
    match p {
        Some(p) => row.extend([
            p.winding.into(),
            num(p.zak.value()),
            num(p.slope_at_kmin),
            num(p.slope_bound),
            p.edge_states_exist.into(),
            p.marginal.into(),
        ]),
        // gapless or outside the two-band classification at this wavenumber
        None => row.extend([
            Value::Null,
            Value::Null,
            Value::Null,
            num(width as f64 + 1.0),
            false.into(),
            Value::Null,
        ]),
    }
    row.extend(extra);
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use omlat_core::RibbonCouplings;

    #[test]
    fn grid_starts_at_the_zone_edge() {
        let k: Vec<f64> = k_grid(4).collect();
        assert_eq!(k, vec![-PI, -PI / 2.0, 0.0, PI / 2.0]);
    }

    #[test]
    fn rows_match_the_header() {
        let c = RibbonCouplings { j: 1.0, jp: 1.0 };
        let p = ribbon_edge_prediction(RibbonOrientation::ZigZag, 2.5, 4, &c).ok();
        let row = prediction_row(RibbonOrientation::ZigZag, 4, 2.5, p.as_ref(), vec![]);
        assert_eq!(row.len(), prediction_table().columns.len());
        assert_eq!(row[0], "zig_zag");
        let gapless = prediction_row(RibbonOrientation::ZigZag, 4, 0.0, None, vec![]);
        assert_eq!(gapless.len(), row.len());
    }
}
