//! Critical points of a linear height function composed with the map,
//! read off the contour geometry.
//!
//! A critical point sits wherever the contour tangent is perpendicular to
//! the height direction. Its index follows from two local facts: whether
//! the tangency is a minimum or maximum of the height along the contour,
//! and whether the face with more preimages lies on the concave side.

use std::collections::HashMap;

use super::{AnalysisError, Labeling};
use crate::portrait::{Point, Portrait, VertexKind};

/// Minimum |cos| between the height direction and a cusp tangent.
const CUSP_GENERICITY: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MorseDatum {
    pub value: f64,
    pub index: u8,
    pub location: Point,
    /// Id of the arc or circle carrying the tangency.
    pub element: String,
}

fn dedup_points(pts: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(pts.len());
    for &q in pts {
        if out.last() != Some(&q) {
            out.push(q);
        }
    }
    out
}

/// Extremum of the parabola through `(-a, h0)`, `(0, h1)`, `(b, h2)`.
fn parabolic_extremum(a: f64, b: f64, h0: f64, h1: f64, h2: f64) -> f64 {
    let c1 = (a * a * (h2 - h1) - b * b * (h0 - h1)) / (a * b * (a + b));
    let c2 = (a * (h2 - h1) + b * (h0 - h1)) / (a * b * (a + b));
    if c2.abs() < 1e-300 || c1 == 0.0 {
        return h1;
    }
    let v = h1 - c1 * c1 / (4.0 * c2);
    let (lo, hi) = (h0.min(h1).min(h2), h0.max(h1).max(h2));
    // A corner rather than a smooth turn; keep the vertex value.
    if v < lo - (hi - lo) || v > hi + (hi - lo) {
        h1
    } else {
        v
    }
}

struct Walker<'a> {
    dir: Point,
    labeling: &'a Labeling,
}

impl Walker<'_> {
    fn count(&self, face: &str) -> Result<i64, AnalysisError> {
        self.labeling
            .get(face)
            .ok_or_else(|| AnalysisError::MissingLabel(face.to_string()))
    }

    /// Tangencies strictly inside a polyline (cyclic when `closed`).
    fn scan(
        &self,
        element: &str,
        pts: &[Point],
        closed: bool,
        left: &str,
        right: &str,
        out: &mut Vec<MorseDatum>,
    ) -> Result<(), AnalysisError> {
        let pts = dedup_points(pts);
        let m = pts.len();
        let segs = if closed { m } else { m.saturating_sub(1) };
        if segs == 0 {
            return Ok(());
        }
        let seg = |i: usize| pts[(i + 1) % m].sub(pts[i % m]);
        let slope: Vec<f64> = (0..segs).map(|i| seg(i).dot(self.dir)).collect();
        for (i, s) in slope.iter().enumerate() {
            if s.abs() <= 1e-14 * seg(i).norm() {
                return Err(AnalysisError::DegenerateDirection {
                    element: element.to_string(),
                    detail: format!("segment {i} is perpendicular to the height direction"),
                });
            }
        }
        let (n_left, n_right) = (self.count(left)?, self.count(right)?);
        if (n_left - n_right).abs() != 2 {
            return Err(AnalysisError::Contradiction {
                faces: vec![left.to_string(), right.to_string()],
                reason: format!("counts {n_left} and {n_right} across {element} do not differ by 2"),
            });
        }
        let rich_is_left = n_left > n_right;
        let first = if closed { 0 } else { 1 };
        for k in first..segs {
            let prev = if k == 0 { segs - 1 } else { k - 1 };
            if slope[prev].signum() == slope[k].signum() {
                continue;
            }
            let (d0, d1) = (seg(prev), seg(k));
            let turn = d0.cross(d1);
            if turn == 0.0 {
                return Err(AnalysisError::DegenerateDirection {
                    element: element.to_string(),
                    detail: format!("polyline reverses at point {k}"),
                });
            }
            let q = pts[k % m];
            let h = |p: Point| p.dot(self.dir);
            let value = parabolic_extremum(d0.norm(), d1.norm(), h(pts[prev % m]), h(q), h(pts[(k + 1) % m]));
            let is_min = slope[prev] < 0.0;
            let concave_is_left = turn > 0.0;
            let index = match (rich_is_left == concave_is_left, is_min) {
                (true, true) => 0,
                (true, false) => 2,
                (false, _) => 1,
            };
            out.push(MorseDatum {
                value,
                index,
                location: q,
                element: element.to_string(),
            });
        }
        Ok(())
    }
}

/// Morse data of `w -> w . (cos theta, sin theta)` composed with the map,
/// sorted by critical value. Needs a surface portrait with geometry.
pub fn levine_morse_data(p: &Portrait, labeling: &Labeling, theta: f64) -> Result<Vec<MorseDatum>, AnalysisError> {
    if p.dim != 2 {
        return Err(AnalysisError::NotSurface(p.dim));
    }
    let dir = Point::new(theta.cos(), theta.sin());
    let walker = Walker { dir, labeling };
    let mut out = Vec::new();

    // Outward unit directions of arc-ends at each vertex.
    let mut ends: HashMap<&str, Vec<Point>> = HashMap::new();
    for a in &p.arcs {
        let pts = a
            .points
            .as_ref()
            .ok_or_else(|| AnalysisError::MissingGeometry(a.id.clone()))?;
        let pts = dedup_points(pts);
        if pts.len() < 2 {
            return Err(AnalysisError::MissingGeometry(a.id.clone()));
        }
        walker.scan(&a.id, &pts, false, &a.left, &a.right, &mut out)?;
        let n = pts.len();
        let out_from = pts[1].sub(pts[0]);
        let out_to = pts[n - 2].sub(pts[n - 1]);
        ends.entry(a.from.as_str())
            .or_default()
            .push(out_from.scale(1.0 / out_from.norm()));
        ends.entry(a.to.as_str())
            .or_default()
            .push(out_to.scale(1.0 / out_to.norm()));
    }
    for c in &p.circles {
        let pts = c
            .points
            .as_ref()
            .ok_or_else(|| AnalysisError::MissingGeometry(c.id.clone()))?;
        walker.scan(&c.id, pts, true, &c.left, &c.right, &mut out)?;
    }

    for v in &p.vertices {
        let dirs = ends.get(v.id.as_str()).cloned().unwrap_or_default();
        match v.kind {
            VertexKind::Cusp => {
                for u in &dirs {
                    if u.dot(dir).abs() < CUSP_GENERICITY {
                        return Err(AnalysisError::DegenerateDirection {
                            element: v.id.clone(),
                            detail: "cusp tangent is perpendicular to the height direction".to_string(),
                        });
                    }
                }
            }
            VertexKind::Crossing => {
                // Each branch through the crossing pairs two nearly opposite ends.
                for (i, u) in dirs.iter().enumerate() {
                    let partner = dirs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .min_by(|a, b| u.dot(*a.1).total_cmp(&u.dot(*b.1)))
                        .map(|(_, w)| *w);
                    if let Some(w) = partner {
                        // Travelling in along -u and out along w.
                        if (-u.dot(dir)).signum() != w.dot(dir).signum() {
                            return Err(AnalysisError::DegenerateDirection {
                                element: v.id.clone(),
                                detail: "contour tangency at a crossing".to_string(),
                            });
                        }
                    }
                }
            }
        }
    }

    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(out)
}
