use std::fs;

use omlat_disorder::{invert_zeta, run_ensemble};
use serde_json::json;

use crate::config::Loaded;
use crate::error::{Classify, CliError, CliResult};
use crate::output::{num, Format, Staging, Table};

pub fn disorder(l: &Loaded, out: &Staging, seed: u64, format: Format) -> CliResult<String> {
    l.require_chain("disorder")?;
    let d = l
        .config
        .disorder
        .as_ref()
        .ok_or_else(|| CliError::config("disorder needs a [disorder] table"))?;
    let ens = run_ensemble(&l.spec, &d.sigma_grid, d.samples, seed).numerical()?;
    match format {
        Format::Csv => ens
            .write_csv(fs::File::create(out.path("ensemble.csv")).io()?)
            .io()?,
        Format::Json => {
            let mut t = Table::new(["sigma", "mean", "p5", "p15", "p85", "p95"]);
            for p in &ens.points {
                t.push(
                    [
                        p.sigma,
                        p.zeta_mean,
                        p.zeta_p5,
                        p.zeta_p15,
                        p.zeta_p85,
                        p.zeta_p95,
                    ]
                    .map(num)
                    .to_vec(),
                );
            }
            t.write(out, "ensemble", format)?;
        }
    }
    out.write_json("manifest.json", &ens.manifest_json())?;
    let Some(zeta) = d.zeta_measured else {
        return Ok(format!(
            "{} disorder levels × {} samples",
            ens.points.len(),
            d.samples
        ));
    };
    let inv = invert_zeta(zeta, &ens, d.confidence).config()?;
    out.write_json(
        "inversion.json",
        &json!({
            "zeta_measured": zeta,
            "confidence": d.confidence,
            "bounds": inv.bounds,
            "grid_hits": inv.grid_hits,
            "diagnostic": inv.diagnostic,
        }),
    )?;
    Ok(match inv.bounds {
        Some((lo, hi)) => format!("ζ = {zeta} ↦ σ ∈ [{:.4}%, {:.4}%]", lo * 100.0, hi * 100.0),
        None => format!("ζ = {zeta} is outside every {}% band", d.confidence * 100.0),
    })
}
