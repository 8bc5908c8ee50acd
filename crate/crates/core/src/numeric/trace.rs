//! Fold locus continuation on `{g = 0}`.

use std::collections::HashMap;

use rayon::prelude::*;

use super::linalg::{self, V3};
use super::{Compiled, Domain, MapSpec, NumericError};

/// A traced component of the fold locus.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldCurve {
    /// Points on the surface with `g = h = 0` up to the Newton tolerance.
    pub points: Vec<V3>,
    /// Unit tangents, oriented along the direction of travel.
    pub tangents: Vec<V3>,
    /// `(F1, F2)` of each point.
    pub image: Vec<[f64; 2]>,
    /// Closed curves wrap from the last point back to the first.
    pub closed: bool,
}

impl FoldCurve {
    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.points.len()
        } else {
            self.points.len().saturating_sub(1)
        }
    }
}

pub(crate) struct Tracer<'a> {
    pub spec: &'a MapSpec,
    pub c: Compiled,
    pub scale: f64,
}

impl<'a> Tracer<'a> {
    pub fn new(spec: &'a MapSpec) -> Self {
        Tracer {
            spec,
            c: spec.compile(),
            scale: spec.scale(),
        }
    }

    /// Unit fold tangent `grad g x grad h`.
    pub fn tangent(&self, p: &V3) -> Result<V3, NumericError> {
        let dg = self.c.grad_g(p)?;
        let gn = linalg::norm(&dg);
        if gn < self.spec.tol.grad_min {
            return Err(NumericError::Singular { at: *p, grad: gn });
        }
        let t = linalg::cross(&dg, &self.c.grad_h(p)?);
        let n = linalg::norm(&t);
        if n == 0.0 || !n.is_finite() {
            return Err(NumericError::Divergence { at: *p });
        }
        Ok(linalg::scale(&t, 1.0 / n))
    }

    /// Newton on `(g, h)` with minimum-norm steps. `None` if it fails to
    /// converge or wanders further than `reach`.
    pub fn correct(&self, start: &V3, reach: f64) -> Option<V3> {
        let tol = self.spec.tol.newton * self.scale;
        let mut p = *start;
        for _ in 0..30 {
            let g = self.c.g(&p).ok()?;
            let h = self.c.h(&p).ok()?;
            let dg = self.c.grad_g(&p).ok()?;
            let dh = self.c.grad_h(&p).ok()?;
            let (ng, nh) = (linalg::norm(&dg), linalg::norm(&dh));
            if ng == 0.0 || nh == 0.0 {
                return None;
            }
            let step = linalg::min_norm2(&dg, &dh, -g, -h)?;
            p = linalg::add(&p, &step);
            if !p.iter().all(|v| v.is_finite()) || linalg::dist(&p, start) > reach {
                return None;
            }
            if linalg::norm(&step) < tol && (g / ng).abs() < tol && (h / nh).abs() < tol {
                return Some(p);
            }
        }
        None
    }

    fn seeds(&self) -> Result<Vec<V3>, NumericError> {
        let spec = self.spec;
        let n = spec.tol.seed_grid;
        let b = spec.bbox;
        let node = |i: usize, j: usize, k: usize| -> V3 {
            [
                b[0][0] + (b[0][1] - b[0][0]) * i as f64 / n as f64,
                b[1][0] + (b[1][1] - b[1][0]) * j as f64 / n as f64,
                b[2][0] + (b[2][1] - b[2][0]) * k as f64 / n as f64,
            ]
        };
        let m = n + 1;
        let values: Vec<f64> = (0..m * m * m)
            .into_par_iter()
            .map(|code| {
                let (i, j, k) = (code / (m * m), (code / m) % m, code % m);
                self.c.g(&node(i, j, k)).unwrap_or(f64::NAN)
            })
            .collect();
        let val = |i: usize, j: usize, k: usize| values[(i * m + j) * m + k];

        if spec.domain == Domain::Closed {
            let first = val(0, 0, 0);
            for code in 0..m * m * m {
                let (i, j, k) = (code / (m * m), (code / m) % m, code % m);
                if ![i, j, k].iter().any(|&v| v == 0 || v == n) {
                    continue;
                }
                let v = val(i, j, k);
                if !(v.is_finite() && v != 0.0 && v.signum() == first.signum()) {
                    return Err(NumericError::SurfaceNotEnclosed { at: node(i, j, k) });
                }
            }
        }

        // Surface points on sign-changing grid edges, grouped by cell.
        let g = |p: &V3| self.c.g(p).unwrap_or(f64::NAN);
        let edge_point = |a: V3, b: V3, ga: f64| -> V3 {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..60 {
                let mid = linalg::lerp(&lo, &hi, 0.5);
                if g(&mid).signum() == ga.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            linalg::lerp(&lo, &hi, 0.5)
        };
        let cells: Vec<Option<V3>> = (0..n * n * n)
            .into_par_iter()
            .map(|code| {
                let (i, j, k) = (code / (n * n), (code / n) % n, code % n);
                let mut pts: Vec<(V3, f64)> = Vec::new();
                for (a, e) in CELL_EDGES {
                    let (ia, ja, ka) = (i + a.0, j + a.1, k + a.2);
                    let (ib, jb, kb) = (i + e.0, j + e.1, k + e.2);
                    let (ga, gb) = (val(ia, ja, ka), val(ib, jb, kb));
                    if !(ga.is_finite() && gb.is_finite()) || ga.signum() == gb.signum() || ga == 0.0 {
                        continue;
                    }
                    let p = edge_point(node(ia, ja, ka), node(ib, jb, kb), ga);
                    if let Ok(h) = self.c.h(&p) {
                        pts.push((p, h));
                    }
                }
                for x in 0..pts.len() {
                    for y in x + 1..pts.len() {
                        if pts[x].1.signum() != pts[y].1.signum() {
                            let mid = linalg::lerp(&pts[x].0, &pts[y].0, 0.5);
                            let reach = 2.0 * linalg::dist(&pts[x].0, &pts[y].0) + 1e-12;
                            if let Some(s) = self.correct(&mid, reach) {
                                return Some(s);
                            }
                        }
                    }
                }
                None
            })
            .collect();
        Ok(cells.into_iter().flatten().collect())
    }

    /// Walk from `seed` along `dir` (+1 / -1 times the fold tangent).
    /// Returns the points after the seed and whether the walk closed up.
    fn walk(&self, seed: &V3, dir: f64) -> Result<(Vec<V3>, bool), NumericError> {
        let tol = &self.spec.tol;
        let s_max = tol.step * self.scale;
        let s_min = tol.step_min * self.scale;
        let mut s = s_max;
        let mut p = *seed;
        let mut t = linalg::scale(&self.tangent(seed)?, dir);
        let mut out = Vec::new();
        let mut length = 0.0;
        let max_steps = (1e3 / tol.step).max(1e5) as usize;
        for _ in 0..max_steps {
            let predicted = linalg::add(&p, &linalg::scale(&t, s));
            let accepted = self.correct(&predicted, 0.5 * s).and_then(|q| {
                let d = linalg::dist(&p, &q);
                let mut tq = self.tangent(&q).ok()?;
                if linalg::dot(&tq, &t) < 0.0 {
                    tq = linalg::scale(&tq, -1.0);
                }
                // Keep turning per step below ~0.2 rad.
                if d < 0.5 * s || d > 1.5 * s || linalg::dot(&tq, &t) < 0.98 {
                    return None;
                }
                Some((q, tq))
            });
            let Some((q, tq)) = accepted else {
                s *= 0.5;
                if s < s_min {
                    return Err(NumericError::Divergence { at: p });
                }
                continue;
            };
            if length > 3.0 * s_max && passes_near(seed, &p, &q, 0.25 * s) {
                return Ok((out, true));
            }
            if !self.spec.contains(&q) {
                return match self.spec.domain {
                    Domain::Closed => Err(NumericError::OpenCurve { at: q }),
                    Domain::Bounded => Ok((out, false)),
                };
            }
            length += linalg::dist(&p, &q);
            out.push(q);
            p = q;
            t = tq;
            s = (s * 1.5).min(s_max);
        }
        Err(NumericError::Divergence { at: p })
    }

    fn trace(&self, seed: &V3) -> Result<FoldCurve, NumericError> {
        let (fwd, closed) = self.walk(seed, 1.0)?;
        let mut points = Vec::new();
        if !closed {
            let (back, closed_back) = self.walk(seed, -1.0)?;
            if closed_back {
                return Err(NumericError::Divergence { at: *seed });
            }
            points.extend(back.into_iter().rev());
        }
        points.push(*seed);
        points.extend(fwd);
        self.finish(points, closed)
    }

    pub fn finish(&self, points: Vec<V3>, closed: bool) -> Result<FoldCurve, NumericError> {
        let mut tangents = Vec::with_capacity(points.len());
        let mut image = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let mut t = self.tangent(p)?;
            let next = if i + 1 < points.len() {
                linalg::sub(&points[i + 1], p)
            } else {
                linalg::sub(p, &points[i.saturating_sub(1)])
            };
            if linalg::dot(&t, &next) < 0.0 {
                t = linalg::scale(&t, -1.0);
            }
            tangents.push(t);
            image.push(self.c.map(p)?);
        }
        Ok(FoldCurve {
            points,
            tangents,
            image,
            closed,
        })
    }
}

type Corner = (usize, usize, usize);

/// The 12 edges of a unit cell as pairs of corner offsets.
const CELL_EDGES: [(Corner, Corner); 12] = [
    ((0, 0, 0), (1, 0, 0)),
    ((0, 1, 0), (1, 1, 0)),
    ((0, 0, 1), (1, 0, 1)),
    ((0, 1, 1), (1, 1, 1)),
    ((0, 0, 0), (0, 1, 0)),
    ((1, 0, 0), (1, 1, 0)),
    ((0, 0, 1), (0, 1, 1)),
    ((1, 0, 1), (1, 1, 1)),
    ((0, 0, 0), (0, 0, 1)),
    ((1, 0, 0), (1, 0, 1)),
    ((0, 1, 0), (0, 1, 1)),
    ((1, 1, 0), (1, 1, 1)),
];

/// Whether `x` lies within `r` of segment `ab`, strictly between its ends.
fn passes_near(x: &V3, a: &V3, b: &V3, r: f64) -> bool {
    let ab = linalg::sub(b, a);
    let len2 = linalg::dot(&ab, &ab);
    if len2 == 0.0 {
        return false;
    }
    let u = linalg::dot(&linalg::sub(x, a), &ab) / len2;
    if !(-0.01..=1.01).contains(&u) {
        return false;
    }
    linalg::dist(x, &linalg::lerp(a, b, u)) < r
}

/// Spatial hash of traced points used to skip redundant seeds.
struct Occupancy {
    cell: f64,
    map: HashMap<[i64; 3], Vec<V3>>,
}

impl Occupancy {
    fn key(&self, p: &V3) -> [i64; 3] {
        [
            (p[0] / self.cell).floor() as i64,
            (p[1] / self.cell).floor() as i64,
            (p[2] / self.cell).floor() as i64,
        ]
    }

    fn insert(&mut self, p: V3) {
        let k = self.key(&p);
        self.map.entry(k).or_default().push(p);
    }

    fn near(&self, p: &V3, r: f64) -> bool {
        let k = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(v) = self.map.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        if v.iter().any(|q| linalg::dist(p, q) < r) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Trace every component of the fold locus inside the box.
///
/// Closed sources yield closed curves; in bounded mode curves may end at
/// the box boundary. Curves come out in seed-scan order.
pub fn trace_fold_locus(spec: &MapSpec) -> Result<Vec<FoldCurve>, NumericError> {
    let tracer = Tracer::new(spec);
    trace_with(&tracer)
}

pub(crate) fn trace_with(tracer: &Tracer) -> Result<Vec<FoldCurve>, NumericError> {
    let spec = tracer.spec;
    let seeds = tracer.seeds()?;
    let s_max = spec.tol.step * tracer.scale;
    let cell_size = spec
        .bbox
        .iter()
        .map(|[a, b]| (b - a) / spec.tol.seed_grid as f64)
        .fold(0.0, f64::max);
    let radius = 2.0 * s_max.max(cell_size);
    let mut occ = Occupancy {
        cell: radius,
        map: HashMap::new(),
    };
    let mut curves = Vec::new();
    for seed in seeds {
        if occ.near(&seed, radius) {
            continue;
        }
        let curve = tracer.trace(&seed)?;
        // Fill gaps between samples so seeds near long segments are caught.
        let m = curve.points.len();
        for i in 0..curve.segment_count() {
            let (a, b) = (curve.points[i], curve.points[(i + 1) % m]);
            occ.insert(a);
            occ.insert(linalg::lerp(&a, &b, 0.5));
        }
        occ.insert(curve.points[m - 1]);
        curves.push(curve);
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::fixtures;

    #[test]
    fn sphere_equator() {
        let curves = trace_fold_locus(&fixtures::sphere()).unwrap();
        assert_eq!(curves.len(), 1);
        let c = &curves[0];
        assert!(c.closed);
        for (p, w) in c.points.iter().zip(&c.image) {
            assert!(p[2].abs() < 1e-9);
            assert!(((w[0] * w[0] + w[1] * w[1]).sqrt() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn torus_two_equators() {
        let curves = trace_fold_locus(&fixtures::torus()).unwrap();
        assert_eq!(curves.len(), 2);
        let mut radii: Vec<f64> = curves
            .iter()
            .map(|c| (c.image[0][0].powi(2) + c.image[0][1].powi(2)).sqrt())
            .collect();
        radii.sort_by(f64::total_cmp);
        assert!((radii[0] - 1.0).abs() < 1e-8 && (radii[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn open_surface_in_closed_mode() {
        let mut spec = fixtures::twice_fold();
        spec.domain = Domain::Closed;
        assert!(matches!(
            trace_fold_locus(&spec),
            Err(NumericError::SurfaceNotEnclosed { .. })
        ));
    }

    #[test]
    fn bounded_twice_fold_branches() {
        let curves = trace_fold_locus(&fixtures::twice_fold()).unwrap();
        assert_eq!(curves.len(), 2);
        for c in &curves {
            assert!(!c.closed);
            for p in &c.points {
                assert!((4.0 * p[0] * p[1] - 0.04).abs() < 1e-9);
            }
        }
    }
}
