//! One module per subcommand. Each writes its artifacts into a staging
//! directory and returns a one-line summary for the terminal.

mod circuit;
mod disorder;
mod measure;
mod recover;
mod spectrum;
mod topology;

pub use circuit::circuit;
pub use disorder::disorder;
pub use measure::measure_sim;
pub use recover::recover;
pub use spectrum::spectrum;
pub use topology::topology;

use omlat_core::{CouplingHamiltonian, LatticeSpec, ModeSet, TopologyKind, EDGE_SITES};
use serde_json::Value;

use crate::output::{num, Table};

/// Sites counted as the edges of a chain or flake.
pub(crate) fn edge_sites(spec: &LatticeSpec) -> Vec<usize> {
    match spec.topology_kind {
        TopologyKind::HoneycombFlake => EDGE_SITES.to_vec(),
        _ => vec![0, spec.n_sites - 1],
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// `mode, eigenfreq_hz, <site labels>` with one row per mode.
pub(crate) fn mode_table(
    modes: &ModeSet,
    labels: &[String],
    rows: &nalgebra::DMatrix<f64>,
) -> Table {
    let mut t = Table::new(
        ["mode".to_string(), "eigenfreq_hz".to_string()]
            .into_iter()
            .chain(labels.iter().cloned()),
    );
    for (k, f) in modes.eigenfreqs().iter().enumerate() {
        let mut row: Vec<Value> = vec![(k + 1).into(), num(*f)];
        row.extend(rows.row(k).iter().map(|x| num(*x)));
        t.push(row);
    }
    t
}

pub(crate) fn hamiltonian_table(h: &CouplingHamiltonian) -> Table {
    let mut t = Table::new(h.site_labels().iter().cloned());
    for r in h.matrix().row_iter() {
        t.push(r.iter().map(|x| num(*x)).collect());
    }
    t
}
