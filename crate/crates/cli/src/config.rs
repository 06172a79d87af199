//! Run configuration.
//!
//! A configuration file is a TOML document with a `[lattice]` table (or a
//! top-level `lattice_file` pointing at a document that holds one) and one
//! optional table per subcommand. Unknown keys anywhere are rejected before
//! any computation starts.

use std::fs;
use std::path::{Path, PathBuf};

use omlat_core::{LatticeSection, LatticeSpec, TopologyKind};
use omlat_measure::NoiseModel;
use serde::Deserialize;

use crate::error::{Classify, CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: Option<LatticeSection>,
    /// Path of a document holding the `[lattice]` table, relative to the
    /// configuration file.
    pub lattice_file: Option<PathBuf>,
    /// Master seed; `--seed` takes precedence.
    pub seed: Option<u64>,
    #[serde(default)]
    pub topology: TopologySection,
    pub measure: Option<MeasureSection>,
    #[serde(default)]
    pub recover: RecoverSection,
    pub disorder: Option<DisorderSection>,
    pub circuit: Option<CircuitSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologySection {
    /// Brillouin-zone samples for windings and Zak phases.
    pub bz_samples: usize,
    /// Points in exported band tables.
    pub band_points: usize,
    /// Side of the square grid used for the graphene gap.
    pub graphene_grid: usize,
    /// Points in a ribbon `k_par` scan.
    pub ribbon_k_points: usize,
    /// `|E| < zero_tol · J` counts as a zero-energy ribbon state.
    pub zero_tol: f64,
}

impl Default for TopologySection {
    fn default() -> Self {
        Self {
            bz_samples: omlat_topology::DEFAULT_BZ_SAMPLES,
            band_points: 256,
            graphene_grid: 512,
            ribbon_k_points: 256,
            zero_tol: 1e-3,
        }
    }
}

/// One value for every mode, or one per mode in ascending frequency order.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PerMode {
    Uniform(f64),
    List(Vec<f64>),
}

impl PerMode {
    pub fn expand(&self, n: usize, name: &str) -> CliResult<Vec<f64>> {
        match self {
            PerMode::Uniform(x) => Ok(vec![*x; n]),
            PerMode::List(v) if v.len() == n => Ok(v.clone()),
            PerMode::List(v) => Err(CliError::config(format!(
                "measure.{name} has {} entries, lattice has {n} modes",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSection {
    /// Total linewidth of each collective mode in Hz.
    pub kappa_tot: PerMode,
    /// Input-port coupling of each mode in Hz.
    pub kappa_1: PerMode,
    /// Output-port coupling of each mode in Hz.
    pub kappa_2: PerMode,
    /// Drive-line power transmittance at each mode frequency.
    pub transmittance: PerMode,
    /// Drive photon fluxes in photons per second.
    pub drive_fluxes: Vec<f64>,
    #[serde(default = "analytic")]
    pub noise: NoiseModel,
    /// Relative cavity-frequency disorder of the simulated device. The
    /// disorder-free lattice remains the sign reference for recovery.
    #[serde(default)]
    pub cavity_disorder: f64,
    /// Write every ringdown trace next to the manifest.
    #[serde(default = "yes")]
    pub keep_traces: bool,
}

fn analytic() -> NoiseModel {
    NoiseModel::Analytic {}
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecoverSection {
    pub sinkhorn_tol: f64,
    pub sinkhorn_max_iter: usize,
    /// Relative Frobenius error below which the reconstruction is reported
    /// as matching the ground truth.
    pub tolerance: f64,
}

impl Default for RecoverSection {
    fn default() -> Self {
        let s = omlat_measure::SinkhornOptions::default();
        Self {
            sinkhorn_tol: s.tol,
            sinkhorn_max_iter: s.max_iter,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSection {
    /// Relative cavity-frequency disorder levels.
    pub sigma_grid: Vec<f64>,
    pub samples: usize,
    /// Measured hybridization factor to invert.
    pub zeta_measured: Option<f64>,
    #[serde(default = "ninety")]
    pub confidence: f64,
}

fn ninety() -> f64 {
    0.9
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSection {
    /// Resonator inductance in H.
    pub inductance: f64,
    /// Bare resonator frequency in Hz; defaults to the mean cavity frequency.
    pub cavity_freq: Option<f64>,
    #[serde(default = "band_points")]
    pub band_points: usize,
    pub drumhead: Option<DrumheadSection>,
}

fn band_points() -> usize {
    512
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrumheadSection {
    /// Radius decrement between consecutive sites in m.
    pub radius_step: f64,
    /// 1-based sites left out of the fit.
    #[serde(default)]
    pub exclude_sites: Vec<usize>,
}

/// A parsed configuration with its lattice resolved.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub spec: LatticeSpec,
}

impl Loaded {
    pub fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.config.seed).unwrap_or(0)
    }

    pub fn require_chain(&self, what: &str) -> CliResult<()> {
        if self.spec.topology_kind == TopologyKind::SshChain {
            Ok(())
        } else {
            Err(CliError::config(format!(
                "{what} needs an ssh_chain lattice, got {:?}",
                self.spec.topology_kind
            )))
        }
    }
}

/// Reads and validates a configuration file. `overrides` are `key=value`
/// pairs with dotted keys, applied before validation.
pub fn load(path: &Path, overrides: &[String]) -> CliResult<Loaded> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let config = parse(&text, overrides)
        .map_err(|e| CliError::config(format!("{}: {:#}", path.display(), e.error)))?;
    let section = match (&config.lattice, &config.lattice_file) {
        (Some(s), None) => s.clone(),
        (None, Some(file)) => {
            let base = path.parent().unwrap_or(Path::new("."));
            let full = base.join(file);
            let text = fs::read_to_string(&full)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", full.display())))?;
            let doc: LatticeOnly = toml::from_str(&text)
                .map_err(|e| CliError::config(format!("{}: {e}", full.display())))?;
            doc.lattice
        }
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "give either [lattice] or lattice_file, not both",
            ));
        }
        (None, None) => return Err(CliError::config("missing [lattice] table")),
    };
    let spec = LatticeSpec::from_section(&section).config()?;
    validate(&config, &spec)?;
    Ok(Loaded { config, spec })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeOnly {
    lattice: LatticeSection,
}

/// Parses configuration text. Without overrides the document is read
/// directly so error messages carry line and column.
pub fn parse(text: &str, overrides: &[String]) -> CliResult<RunConfig> {
    if overrides.is_empty() {
        return toml::from_str(text).config();
    }
    let mut doc: toml::Table = toml::from_str(text).config()?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    RunConfig::deserialize(toml::Value::Table(doc)).config()
}

fn apply_override(doc: &mut toml::Table, assignment: &str) -> CliResult<()> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override `{assignment}` is not key=value")))?;
    let value: toml::Value = {
        let wrapped: toml::Table = toml::from_str(&format!("v = {}", value.trim()))
            .map_err(|e| CliError::config(format!("override `{assignment}`: {e}")))?;
        wrapped["v"].clone()
    };
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, parents) = parts.split_last().expect("split yields at least one part");
    let mut table = doc;
    for p in parents {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::config(format!("override `{key}`: `{p}` is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn validate(c: &RunConfig, spec: &LatticeSpec) -> CliResult<()> {
    let t = &c.topology;
    if t.bz_samples < 8 || t.band_points < 2 || t.graphene_grid < 2 || t.ribbon_k_points < 2 {
        return Err(CliError::config("topology sample counts are too small"));
    }
    if !(t.zero_tol > 0.0) {
        return Err(CliError::config("topology.zero_tol must be positive"));
    }
    if let Some(m) = &c.measure {
        let n = spec.n_sites;
        for (name, v) in [
            ("kappa_tot", &m.kappa_tot),
            ("kappa_1", &m.kappa_1),
            ("kappa_2", &m.kappa_2),
            ("transmittance", &m.transmittance),
        ] {
            v.expand(n, name)?;
        }
        if !(m.cavity_disorder >= 0.0 && m.cavity_disorder.is_finite()) {
            return Err(CliError::config(
                "measure.cavity_disorder must be non-negative",
            ));
        }
    }
    let r = &c.recover;
    if !(r.sinkhorn_tol > 0.0 && r.tolerance > 0.0) || r.sinkhorn_max_iter == 0 {
        return Err(CliError::config(
            "recover tolerances and iteration limit must be positive",
        ));
    }
    if let Some(d) = &c.disorder {
        if d.sigma_grid.is_empty() || d.sigma_grid.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(CliError::config(
                "disorder.sigma_grid needs non-negative entries",
            ));
        }
        if d.samples == 0 {
            return Err(CliError::config("disorder.samples must be positive"));
        }
        if !(d.confidence > 0.0 && d.confidence < 1.0) {
            return Err(CliError::config("disorder.confidence must lie in (0, 1)"));
        }
    }
    if let Some(cs) = &c.circuit {
        if !(cs.inductance > 0.0 && cs.inductance.is_finite()) {
            return Err(CliError::config("circuit.inductance must be positive"));
        }
        if cs.band_points < 2 {
            return Err(CliError::config("circuit.band_points must be at least 2"));
        }
        if let Some(d) = &cs.drumhead {
            if let Some(&bad) = d
                .exclude_sites
                .iter()
                .find(|&&i| i == 0 || i > spec.n_sites)
            {
                return Err(CliError::config(format!(
                    "circuit.drumhead.exclude_sites: no site {bad}"
                )));
            }
        }
    }
    Ok(())
}
