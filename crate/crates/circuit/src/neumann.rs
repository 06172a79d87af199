use rayon::prelude::*;

use crate::error::{CircuitError, Result};
use crate::wire::{dist, WireCurve};

/// Vacuum permeability in H/m (CODATA 2018).
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Mutual inductance of two thin wires by Neumann's formula,
/// `M = (μ₀/4π) ∮∮ dℓ_a·dℓ_b / |r_a − r_b|`, with each curve split into
/// `n_segments` pieces of equal arc length and the midpoint rule on every
/// segment pair.
///
/// The filament integral diverges for touching conductors, so curves whose
/// segment midpoints come closer than the longest segment are rejected.
pub fn mutual_inductance_neumann(a: &WireCurve, b: &WireCurve, n_segments: usize) -> Result<f64> {
    if n_segments == 0 {
        return Err(CircuitError::InvalidParameter(
            "n_segments must be positive".into(),
        ));
    }
    let sa = a.segments(n_segments);
    let sb = b.segments(n_segments);
    let seg_len = sa
        .iter()
        .chain(&sb)
        .map(|&(p, q)| dist(p, q))
        .fold(0.0, f64::max);
    let prep = |s: &[([f64; 3], [f64; 3])]| -> Vec<([f64; 3], [f64; 3])> {
        s.iter()
            .map(|&(p, q)| {
                (
                    [0, 1, 2].map(|d| 0.5 * (p[d] + q[d])),
                    [0, 1, 2].map(|d| q[d] - p[d]),
                )
            })
            .collect()
    };
    let (pa, pb) = (prep(&sa), prep(&sb));
    let (sum, closest) = pa
        .par_iter()
        .map(|&(ma, da)| {
            pb.iter()
                .fold((0.0, f64::INFINITY), |(acc, near), &(mb, db)| {
                    let r = dist(ma, mb);
                    let dot = da[0] * db[0] + da[1] * db[1] + da[2] * db[2];
                    (acc + dot / r, near.min(r))
                })
        })
        .reduce(|| (0.0, f64::INFINITY), |x, y| (x.0 + y.0, x.1.min(y.1)));
    if closest <= seg_len {
        return Err(CircuitError::CurvesTooClose {
            distance: closest,
            segment: seg_len,
        });
    }
    Ok(MU0 / (4.0 * std::f64::consts::PI) * sum)
}
