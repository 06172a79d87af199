//! From a measured hybridization factor back to a disorder strength.

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleResult;
use crate::error::{DisorderError, Result};

/// Slack on band edges so that ζ = 1 is inside the degenerate band at
/// σ = 0.
const BAND_SLACK: f64 = 1e-9;

/// Disorder strengths compatible with a measured ζ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaInterval {
    /// `None` when no grid point's band contains ζ.
    pub bounds: Option<(f64, f64)>,
    /// Grid points whose band contains ζ.
    pub grid_hits: Vec<f64>,
    pub diagnostic: Option<String>,
}

/// The range of σ whose central `confidence` band of ζ contains
/// `zeta_measured`.
///
/// Endpoints are refined by linear interpolation of the band edge between
/// the last grid point inside and the first grid point outside. A hit at
/// the first grid point is reported as that grid value.
pub fn invert_zeta(
    zeta_measured: f64,
    ensemble: &EnsembleResult,
    confidence: f64,
) -> Result<SigmaInterval> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(DisorderError::InvalidParameter(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let pts = &ensemble.points;
    if pts.windows(2).any(|w| w[1].sigma <= w[0].sigma) {
        return Err(DisorderError::InvalidParameter(
            "sigma grid must be strictly increasing".into(),
        ));
    }
    let bands: Vec<(f64, f64)> = pts.iter().map(|p| p.band(confidence)).collect();
    let inside =
        |b: &(f64, f64)| zeta_measured >= b.0 - BAND_SLACK && zeta_measured <= b.1 + BAND_SLACK;
    let hits: Vec<usize> = (0..pts.len()).filter(|&g| inside(&bands[g])).collect();
    let (Some(&first), Some(&last)) = (hits.first(), hits.last()) else {
        let lo = bands.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
        let hi = bands.iter().map(|b| b.1).fold(f64::NEG_INFINITY, f64::max);
        return Ok(SigmaInterval {
            bounds: None,
            grid_hits: Vec::new(),
            diagnostic: Some(format!(
                "ζ = {zeta_measured} lies outside every {:.0}% band (ζ spans [{lo:.4}, {hi:.4}] over the grid)",
                100.0 * confidence
            )),
        });
    };
    let crossing = |a: usize, b: usize| {
        // the edge that ζ leaves through between grid points a and b
        let (ea, eb) = if zeta_measured > bands[b].1 + BAND_SLACK {
            (bands[a].1, bands[b].1)
        } else {
            (bands[a].0, bands[b].0)
        };
        let t = if (eb - ea).abs() > 0.0 {
            ((zeta_measured - ea) / (eb - ea)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        pts[a].sigma + t * (pts[b].sigma - pts[a].sigma)
    };
    let lower = if first == 0 {
        pts[0].sigma
    } else {
        crossing(first, first - 1)
    };
    let upper = if last + 1 == pts.len() {
        pts[last].sigma
    } else {
        crossing(last, last + 1)
    };
    let gaps = hits.windows(2).any(|w| w[1] != w[0] + 1);
    Ok(SigmaInterval {
        bounds: Some((lower, upper)),
        grid_hits: hits.iter().map(|&g| pts[g].sigma).collect(),
        diagnostic: gaps.then(|| "the compatible grid points are not contiguous".to_string()),
    })
}
