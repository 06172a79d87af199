use std::f64::consts::PI;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{CircuitError, Result};

/// Ordered 3D polyline (m) approximating a thin conductor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireCurve {
    points: Vec<[f64; 3]>,
}

#[derive(Deserialize)]
struct CsvPoint {
    x: f64,
    y: f64,
    z: f64,
}

impl WireCurve {
    pub fn new(points: Vec<[f64; 3]>) -> Result<Self> {
        if points.len() < 2 {
            return Err(CircuitError::InvalidCurve(
                "need at least two points".into(),
            ));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(CircuitError::InvalidCurve("non-finite coordinate".into()));
        }
        for (i, w) in points.windows(2).enumerate() {
            if dist(w[0], w[1]) == 0.0 {
                return Err(CircuitError::InvalidCurve(format!(
                    "points {i} and {} coincide",
                    i + 1
                )));
            }
        }
        Ok(Self { points })
    }

    /// Reads `x,y,z` rows (m) with a header line.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let points = rdr
            .deserialize::<CsvPoint>()
            .map(|row| row.map(|p| [p.x, p.y, p.z]))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(points)
    }

    /// Closed circle of radius `r` about `centre` in the plane normal to
    /// `axis`, as a polygon with `n` sides. The first point is repeated at the end.
    pub fn circle(centre: [f64; 3], axis: [f64; 3], r: f64, n: usize) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) || n < 3 {
            return Err(CircuitError::InvalidCurve(format!(
                "circle r = {r}, n = {n}"
            )));
        }
        let (u, v) = plane_basis(axis)?;
        let points = (0..=n)
            .map(|i| {
                let t = 2.0 * PI * (i % n) as f64 / n as f64;
                let (s, c) = t.sin_cos();
                [0, 1, 2].map(|d| centre[d] + r * (c * u[d] + s * v[d]))
            })
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| dist(w[0], w[1])).sum()
    }

    /// Rigid motion `p ↦ R·p + shift` with `rotation` a proper orthogonal matrix.
    pub fn transformed(&self, rotation: [[f64; 3]; 3], shift: [f64; 3]) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| {
                [0, 1, 2].map(|i| {
                    rotation[i][0] * p[0] + rotation[i][1] * p[1] + rotation[i][2] * p[2] + shift[i]
                })
            })
            .collect();
        Self { points }
    }

    /// `n` segments of equal arc length along the polyline, as (start, end) pairs.
    pub(crate) fn segments(&self, n: usize) -> Vec<([f64; 3], [f64; 3])> {
        let total = self.length();
        let mut cum = Vec::with_capacity(self.points.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in self.points.windows(2) {
            acc += dist(w[0], w[1]);
            cum.push(acc);
        }
        let at = |s: f64| -> [f64; 3] {
            let j = match cum.binary_search_by(|c| c.total_cmp(&s)) {
                Ok(j) => return self.points[j],
                Err(j) => j.clamp(1, cum.len() - 1),
            };
            let t = (s - cum[j - 1]) / (cum[j] - cum[j - 1]);
            let (a, b) = (self.points[j - 1], self.points[j]);
            [0, 1, 2].map(|d| a[d] + t * (b[d] - a[d]))
        };
        let knots: Vec<[f64; 3]> = (0..=n)
            .map(|i| {
                if i == n {
                    *self.points.last().unwrap()
                } else {
                    at(total * i as f64 / n as f64)
                }
            })
            .collect();
        knots.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

pub(crate) fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn plane_basis(axis: [f64; 3]) -> Result<([f64; 3], [f64; 3])> {
    let norm = dist(axis, [0.0; 3]);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(CircuitError::InvalidCurve(
            "circle axis must be non-zero".into(),
        ));
    }
    let n = axis.map(|x| x / norm);
    let helper = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let u = cross(helper, n);
    let un = dist(u, [0.0; 3]);
    let u = u.map(|x| x / un);
    Ok((u, cross(n, u)))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
