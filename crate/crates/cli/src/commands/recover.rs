use std::path::Path;

use nalgebra::DMatrix;
use omlat_core::diagonalize;
use omlat_measure::{MeasurementDataset, SinkhornOptions};
use serde_json::json;

use super::hamiltonian_table;
use super::measure::GROUND_TRUTH;
use crate::config::Loaded;
use crate::error::{Classify, CliError, CliResult};
use crate::output::{Format, Staging};

pub fn recover(l: &Loaded, dataset: &Path, out: &Staging, format: Format) -> CliResult<String> {
    l.require_chain("recover")?;
    if !dataset.join("manifest.json").is_file() {
        return Err(CliError::config(format!(
            "{} holds no manifest.json",
            dataset.display()
        )));
    }
    let ds = MeasurementDataset::load(dataset).numerical()?;
    if ds.n_sites != l.spec.n_sites {
        return Err(CliError::config(format!(
            "dataset has {} sites, lattice has {}",
            ds.n_sites, l.spec.n_sites
        )));
    }
    let reference = diagonalize(&l.spec.coupling_hamiltonian().config()?).numerical()?;
    let r = &l.config.recover;
    let opts = SinkhornOptions {
        tol: r.sinkhorn_tol,
        max_iter: r.sinkhorn_max_iter,
        ..SinkhornOptions::default()
    };
    let result = omlat_measure::recover(&ds, &reference, &opts).numerical()?;
    result.save(out.dir()).io()?;
    let absolute =
        omlat_core::CouplingHamiltonian::new(result.h_hat.absolute(), None).numerical()?;
    hamiltonian_table(&absolute).write(out, "h_hat_absolute", format)?;

    let truth_path = dataset.join(format!("{GROUND_TRUTH}.csv"));
    if !truth_path.is_file() {
        return Ok(format!(
            "reconstructed {} sites; no ground truth to compare",
            ds.n_sites
        ));
    }
    let truth = read_matrix(&truth_path)?;
    if truth.shape() != absolute.matrix().shape() {
        return Err(CliError::config(format!(
            "{} has the wrong shape",
            truth_path.display()
        )));
    }
    let c = compare(absolute.matrix(), &truth);
    let ok = c.relative_frobenius < r.tolerance;
    out.write_json(
        "comparison.json",
        &json!({
            "relative_frobenius_error": c.relative_frobenius,
            "max_nearest_neighbour_relative_error": c.nearest_neighbour,
            "max_diagonal_error_relative_to_mean": c.diagonal,
            "tolerance": r.tolerance,
            "within_tolerance": ok,
        }),
    )?;
    Ok(format!(
        "relative Frobenius error {:.3e} (within {:e}: {ok})",
        c.relative_frobenius, r.tolerance
    ))
}

pub(crate) struct Comparison {
    pub relative_frobenius: f64,
    pub nearest_neighbour: f64,
    pub diagonal: f64,
}

pub(crate) fn compare(got: &DMatrix<f64>, truth: &DMatrix<f64>) -> Comparison {
    let n = truth.nrows();
    let mean = truth.diagonal().mean();
    Comparison {
        relative_frobenius: (got - truth).norm() / truth.norm(),
        nearest_neighbour: (0..n.saturating_sub(1))
            .map(|i| (got[(i, i + 1)] / truth[(i, i + 1)] - 1.0).abs())
            .fold(0.0, f64::max),
        diagonal: (0..n)
            .map(|i| (got[(i, i)] - truth[(i, i)]).abs() / mean)
            .fold(0.0, f64::max),
    }
}

fn read_matrix(path: &Path) -> CliResult<DMatrix<f64>> {
    let mut r = csv::Reader::from_path(path).io()?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.io()?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        rows.push(row);
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::config(format!(
            "{} is not square",
            path.display()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}
