use std::f64::consts::PI;

use omlat_core::{BlochSeries, RibbonCouplings, RibbonOrientation, SshCouplings};
use serde::{Deserialize, Serialize};

use crate::curve::{phase_derivative, BulkCurve, DEFAULT_BZ_SAMPLES, GAP_RTOL};
use crate::error::{Result, TopologyError};

/// Half-width of the band around `|slope| = N + 1` where the finite-size
/// criterion is reported as marginal.
pub const MARGINAL_BAND: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZakPhase {
    Zero,
    Pi,
}

impl ZakPhase {
    pub fn value(self) -> f64 {
        match self {
            ZakPhase::Zero => 0.0,
            ZakPhase::Pi => PI,
        }
    }
}

/// Finite-size edge-state prediction for one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgePrediction {
    pub zak: ZakPhase,
    pub winding: i64,
    /// Wavenumber of the gap minimum `min_k |ρ(k)|`.
    pub k_min: f64,
    pub min_abs_rho: f64,
    /// Phase reference: wavenumber of the largest `|ρ|`.
    pub k_ref: f64,
    pub slope_at_kmin: f64,
    /// `N + 1`.
    pub slope_bound: f64,
    pub edge_states_exist: bool,
    /// `||slope| − (N+1)| < MARGINAL_BAND`: the asymptotic criterion is not
    /// trusted to decide this case.
    pub marginal: bool,
}

/// Winding of `ρ` around the origin, `Δφ / 2π` over one zone.
pub fn winding_number(curve: &BulkCurve) -> Result<i64> {
    if curve.is_gapless(GAP_RTOL) {
        return Err(TopologyError::Gapless {
            min_abs: curve.min_abs(),
            max_abs: curve.max_abs(),
        });
    }
    let w = curve.total_phase_change() / (2.0 * PI);
    let r = w.round();
    if (w - r).abs() > 1e-6 {
        return Err(TopologyError::Undersampled {
            samples: curve.samples().len(),
        });
    }
    Ok(r as i64)
}

/// `½∮ ∂_k φ dk` reduced to `[0, 2π)` and snapped to `{0, π}`. Curves with
/// `|winding| ≥ 2` are rejected as outside the two-band model even though
/// their reduced phase would read 0.
pub fn zak_phase(curve: &BulkCurve) -> Result<ZakPhase> {
    let winding = winding_number(curve)?;
    if winding.abs() > 1 {
        return Err(TopologyError::OutOfModel { winding });
    }
    let z = (0.5 * curve.total_phase_change()).rem_euclid(2.0 * PI);
    let dist = |target: f64| (z - target).abs().min((z - target - 2.0 * PI).abs());
    let zak = if dist(0.0) <= 1e-3 * PI {
        ZakPhase::Zero
    } else if dist(PI) <= 1e-3 * PI {
        ZakPhase::Pi
    } else {
        return Err(TopologyError::NotQuantized { value: z });
    };
    debug_assert_eq!(zak == ZakPhase::Pi, winding.abs() == 1);
    Ok(zak)
}

/// Wavenumber of `min_k |ρ(k)|`: coarse scan on `n` points, then a golden-section
/// search on the bracketing cells. Ties go to the smallest `k`.
pub fn locate_k_min(series: &BlochSeries, n: usize) -> (f64, f64) {
    let n = n.max(8);
    let h = 2.0 * PI / n as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..n {
        let k = -PI + h * i as f64;
        let a = series.rho(k).norm();
        if a < best.1 * (1.0 - 1e-12) {
            best = (i, a);
        }
    }
    let centre = -PI + h * best.0 as f64;
    let f = |k: f64| series.rho(k).norm();
    let k = golden_section(f, centre - h, centre + h);
    let k = wrap_k(k);
    (k, series.rho(k).norm())
}

/// Wavenumber of the largest `|ρ|`, smallest `k` on ties. It fixes the phase
/// reference of the plane-wave argument; the slope itself does not depend on it.
pub fn reference_wavenumber(series: &BlochSeries, n: usize) -> f64 {
    let n = n.max(8);
    let h = 2.0 * PI / n as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..n {
        let a = series.rho(-PI + h * i as f64).norm();
        if a > best.1 * (1.0 + 1e-12) {
            best = (i, a);
        }
    }
    let centre = -PI + h * best.0 as f64;
    wrap_k(golden_section(
        |k| -series.rho(k).norm(),
        centre - h,
        centre + h,
    ))
}

fn wrap_k(k: f64) -> f64 {
    let w = (k + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Prediction for a generic two-sublattice chain of `n_cells` cells.
pub fn edge_prediction(series: &BlochSeries, n_cells: usize) -> Result<EdgePrediction> {
    let curve = BulkCurve::sample(series, DEFAULT_BZ_SAMPLES)?;
    let winding = winding_number(&curve)?;
    let zak = zak_phase(&curve)?;
    let (k_min, min_abs_rho) = locate_k_min(series, DEFAULT_BZ_SAMPLES);
    let k_ref = reference_wavenumber(series, DEFAULT_BZ_SAMPLES);
    let slope = phase_derivative(series, k_min);
    let bound = n_cells as f64 + 1.0;
    Ok(EdgePrediction {
        zak,
        winding,
        k_min,
        min_abs_rho,
        k_ref,
        slope_at_kmin: slope,
        slope_bound: bound,
        edge_states_exist: zak == ZakPhase::Pi && slope.abs() < bound,
        marginal: (slope.abs() - bound).abs() < MARGINAL_BAND,
    })
}

/// SSH chain of `n_cells` cells; `j2` only shifts the bands and is ignored.
pub fn edge_prediction_finite(couplings: &SshCouplings, n_cells: usize) -> Result<EdgePrediction> {
    couplings.validate()?;
    edge_prediction(&couplings.bloch_series(), n_cells)
}

/// Ribbon chain across `width` cells at wavenumber `k_par`.
pub fn ribbon_edge_prediction(
    orientation: RibbonOrientation,
    k_par: f64,
    width: usize,
    couplings: &RibbonCouplings,
) -> Result<EdgePrediction> {
    couplings.validate()?;
    edge_prediction(&orientation.bloch_series(k_par, couplings), width)
}
