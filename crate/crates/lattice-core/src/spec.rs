//! Declarative lattice description and its configuration-file form.
//!
//! A lattice is written as a `[lattice]` table with nested `couplings` and
//! `sites` tables. Per-site quantities accept either one number (applied to
//! every site) or a list with one entry per site:
//!
//! ```toml
//! [lattice]
//! kind = "ssh_chain"
//! n_cells = 5
//!
//! [lattice.couplings]
//! j = 470e6
//! jp = 700e6
//!
//! [lattice.sites]
//! cavity_freq = 7.12e9
//! g0 = 10.0
//! ```
//!
//! Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{LatticeError, Result};
use crate::flake::{build_honeycomb_flake, FlakeCouplings, FLAKE_SITES};
use crate::hamiltonian::{BlochHamiltonian, CouplingHamiltonian};
use crate::ribbon::{build_ribbon_hamiltonian, RibbonCouplings, RibbonOrientation};
use crate::ssh::{build_ssh_chain, SshCouplings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    SshChain,
    HoneycombFlake,
    RibbonUnitCell,
}

/// Per-site parameters, all in Hz. Mechanical quantities are only needed by
/// the measurement simulation and may be absent otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteParams {
    pub cavity_freq: f64,
    pub mech_freq: Option<f64>,
    pub mech_linewidth: Option<f64>,
    pub g0: Option<f64>,
}

/// Named couplings in Hz. `j2` is used by chains and flakes, `j3`/`j3p` by
/// chains only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CouplingParams {
    pub j: f64,
    pub jp: f64,
    #[serde(default)]
    pub j2: f64,
    #[serde(default)]
    pub j3: f64,
    #[serde(default)]
    pub j3p: f64,
}

impl CouplingParams {
    pub fn ssh(&self) -> SshCouplings {
        SshCouplings {
            j: self.j,
            jp: self.jp,
            j2: self.j2,
            j3: self.j3,
            j3p: self.j3p,
        }
    }

    pub fn flake(&self) -> FlakeCouplings {
        FlakeCouplings {
            j: self.j,
            jp: self.jp,
            j2: self.j2,
        }
    }

    pub fn ribbon(&self) -> RibbonCouplings {
        RibbonCouplings {
            j: self.j,
            jp: self.jp,
        }
    }
}

/// Geometry of a ribbon unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RibbonGeometry {
    pub orientation: RibbonOrientation,
    pub width: usize,
    pub k_par: f64,
}

/// Validated lattice description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub topology_kind: TopologyKind,
    pub n_sites: usize,
    pub site_params: Vec<SiteParams>,
    pub coupling_params: CouplingParams,
    /// Present only for [`TopologyKind::RibbonUnitCell`].
    pub ribbon: Option<RibbonGeometry>,
}

/// One number for every site, or one per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerSite {
    Uniform(f64),
    List(Vec<f64>),
}

impl PerSite {
    fn expand(&self, n: usize, name: &str) -> Result<Vec<f64>> {
        match self {
            PerSite::Uniform(x) => Ok(vec![*x; n]),
            PerSite::List(v) if v.len() == n => Ok(v.clone()),
            PerSite::List(v) => Err(LatticeError::Config(format!(
                "sites.{name} has {} entries, lattice has {n} sites",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SitesSection {
    pub cavity_freq: PerSite,
    pub mech_freq: Option<PerSite>,
    pub mech_linewidth: Option<PerSite>,
    pub g0: Option<PerSite>,
}

/// The `[lattice]` table as written in a configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub kind: TopologyKind,
    pub n_cells: Option<usize>,
    pub orientation: Option<RibbonOrientation>,
    pub width: Option<usize>,
    pub k_par: Option<f64>,
    pub couplings: CouplingParams,
    pub sites: Option<SitesSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeDocument {
    lattice: LatticeSection,
}

impl LatticeSpec {
    /// Parses a document holding only a `[lattice]` table.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: LatticeDocument =
            toml::from_str(text).map_err(|e| LatticeError::Config(e.to_string()))?;
        Self::from_section(&doc.lattice)
    }

    pub fn from_section(s: &LatticeSection) -> Result<Self> {
        let forbid = |present: bool, key: &str| -> Result<()> {
            if present {
                Err(LatticeError::Config(format!(
                    "key lattice.{key} does not apply to kind {:?}",
                    s.kind
                )))
            } else {
                Ok(())
            }
        };
        let (n_sites, ribbon) = match s.kind {
            TopologyKind::SshChain => {
                forbid(s.orientation.is_some(), "orientation")?;
                forbid(s.width.is_some(), "width")?;
                forbid(s.k_par.is_some(), "k_par")?;
                let n = s
                    .n_cells
                    .ok_or_else(|| LatticeError::Config("lattice.n_cells is required".into()))?;
                if n == 0 {
                    return Err(LatticeError::Config(
                        "lattice.n_cells must be positive".into(),
                    ));
                }
                (2 * n, None)
            }
            TopologyKind::HoneycombFlake => {
                forbid(s.n_cells.is_some(), "n_cells")?;
                forbid(s.orientation.is_some(), "orientation")?;
                forbid(s.width.is_some(), "width")?;
                forbid(s.k_par.is_some(), "k_par")?;
                (FLAKE_SITES, None)
            }
            TopologyKind::RibbonUnitCell => {
                forbid(s.n_cells.is_some(), "n_cells")?;
                let orientation = s.orientation.ok_or_else(|| {
                    LatticeError::Config("lattice.orientation is required for ribbons".into())
                })?;
                let width = s
                    .width
                    .ok_or_else(|| LatticeError::Config("lattice.width is required".into()))?;
                if width == 0 {
                    return Err(LatticeError::Config(
                        "lattice.width must be positive".into(),
                    ));
                }
                let geom = RibbonGeometry {
                    orientation,
                    width,
                    k_par: s.k_par.unwrap_or(0.0),
                };
                (2 * width, Some(geom))
            }
        };

        let site_params = match (&s.sites, s.kind) {
            (Some(sites), _) => expand_sites(sites, n_sites)?,
            (None, TopologyKind::RibbonUnitCell) => Vec::new(),
            (None, _) => {
                return Err(LatticeError::Config("lattice.sites is required".into()));
            }
        };
        let spec = Self {
            topology_kind: s.kind,
            n_sites,
            site_params,
            coupling_params: s.couplings,
            ribbon,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.coupling_params;
        for (name, v) in [
            ("j", c.j),
            ("jp", c.jp),
            ("j2", c.j2),
            ("j3", c.j3),
            ("j3p", c.j3p),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(LatticeError::Config(format!(
                    "coupling {name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.topology_kind == TopologyKind::SshChain && self.n_sites % 2 != 0 {
            return Err(LatticeError::Config(
                "SSH chains need an even site count".into(),
            ));
        }
        if self.topology_kind != TopologyKind::SshChain && (c.j3 != 0.0 || c.j3p != 0.0) {
            return Err(LatticeError::Config(
                "j3/j3p apply to SSH chains only".into(),
            ));
        }
        if !self.site_params.is_empty() && self.site_params.len() != self.n_sites {
            return Err(LatticeError::Config(format!(
                "{} site entries for {} sites",
                self.site_params.len(),
                self.n_sites
            )));
        }
        for (i, p) in self.site_params.iter().enumerate() {
            let fields = [
                ("cavity_freq", Some(p.cavity_freq)),
                ("mech_freq", p.mech_freq),
                ("mech_linewidth", p.mech_linewidth),
                ("g0", p.g0),
            ];
            for (name, v) in fields {
                if let Some(v) = v {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(LatticeError::Config(format!(
                            "sites.{name}[{}] must be strictly positive, got {v}",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn cavity_freqs(&self) -> Vec<f64> {
        self.site_params.iter().map(|p| p.cavity_freq).collect()
    }

    /// Number of two-site cells of a chain.
    pub fn n_cells(&self) -> usize {
        self.n_sites / 2
    }

    /// Real Hamiltonian of a chain or flake.
    pub fn coupling_hamiltonian(&self) -> Result<CouplingHamiltonian> {
        match self.topology_kind {
            TopologyKind::SshChain => build_ssh_chain(
                self.n_cells(),
                &self.coupling_params.ssh(),
                &self.cavity_freqs(),
            ),
            TopologyKind::HoneycombFlake => {
                build_honeycomb_flake(&self.coupling_params.flake(), &self.cavity_freqs())
            }
            TopologyKind::RibbonUnitCell => Err(LatticeError::InvalidParameter(
                "ribbon unit cells have a complex Bloch Hamiltonian; use ribbon_hamiltonian".into(),
            )),
        }
    }

    /// Bloch Hamiltonian of a ribbon at its configured `k_par`.
    pub fn ribbon_hamiltonian(&self) -> Result<BlochHamiltonian> {
        let g = self.ribbon.ok_or_else(|| {
            LatticeError::InvalidParameter("lattice is not a ribbon unit cell".into())
        })?;
        build_ribbon_hamiltonian(
            g.orientation,
            g.width,
            g.k_par,
            &self.coupling_params.ribbon(),
        )
    }
}

fn expand_sites(s: &SitesSection, n: usize) -> Result<Vec<SiteParams>> {
    let cav = s.cavity_freq.expand(n, "cavity_freq")?;
    let opt = |v: &Option<PerSite>, name: &str| -> Result<Vec<Option<f64>>> {
        match v {
            Some(p) => Ok(p.expand(n, name)?.into_iter().map(Some).collect()),
            None => Ok(vec![None; n]),
        }
    };
    let mech = opt(&s.mech_freq, "mech_freq")?;
    let lw = opt(&s.mech_linewidth, "mech_linewidth")?;
    let g0 = opt(&s.g0, "g0")?;
    Ok((0..n)
        .map(|i| SiteParams {
            cavity_freq: cav[i],
            mech_freq: mech[i],
            mech_linewidth: lw[i],
            g0: g0[i],
        })
        .collect())
}
