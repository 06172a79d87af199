//! CSV and JSON exports.
//!
//! Matrices are written row-major with a header row of site labels. Mode sets
//! add leading `mode` and `eigenfreq_hz` columns; row `k` is mode `k + 1`.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::hamiltonian::CouplingHamiltonian;
use crate::modes::ModeSet;
use crate::participation::ParticipationMatrix;

/// Writes the Hamiltonian as CSV, one matrix row per line.
pub fn write_hamiltonian_csv<W: Write>(h: &CouplingHamiltonian, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(h.site_labels())?;
    for row in h.matrix().row_iter() {
        w.write_record(row.iter().map(|x| fmt(*x)))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes eigenfrequencies and modeshapes as CSV.
pub fn write_modes_csv<W: Write>(m: &ModeSet, labels: &[String], out: W) -> Result<()> {
    write_mode_table(
        m.eigenfreqs(),
        m.modeshapes()
            .row_iter()
            .map(|r| r.iter().copied().collect()),
        labels,
        out,
    )
}

/// Writes the participation matrix with the eigenfrequency of each row.
pub fn write_participation_csv<W: Write>(
    p: &ParticipationMatrix,
    eigenfreqs: &[f64],
    labels: &[String],
    out: W,
) -> Result<()> {
    write_mode_table(
        eigenfreqs,
        p.eta().row_iter().map(|r| r.iter().copied().collect()),
        labels,
        out,
    )
}

fn write_mode_table<W: Write>(
    freqs: &[f64],
    rows: impl Iterator<Item = Vec<f64>>,
    labels: &[String],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["mode".to_string(), "eigenfreq_hz".to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header)?;
    for (k, (f, row)) in freqs.iter().zip(rows).enumerate() {
        let mut rec = vec![(k + 1).to_string(), fmt(*f)];
        rec.extend(row.into_iter().map(fmt));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest representation that round-trips exactly.
fn fmt(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Serialize)]
struct HamiltonianJson<'a> {
    site_labels: &'a [String],
    matrix: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct ModeSetJson {
    eigenfreqs: Vec<f64>,
    modeshapes: Vec<Vec<f64>>,
}

pub fn hamiltonian_json(h: &CouplingHamiltonian) -> serde_json::Value {
    serde_json::to_value(HamiltonianJson {
        site_labels: h.site_labels(),
        matrix: rows(h.matrix()),
    })
    .expect("plain numeric data serializes")
}

pub fn modes_json(m: &ModeSet) -> serde_json::Value {
    serde_json::to_value(ModeSetJson {
        eigenfreqs: m.eigenfreqs().to_vec(),
        modeshapes: rows(m.modeshapes()),
    })
    .expect("plain numeric data serializes")
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}
