//! From traced fold curves to a labeled planar portrait.
//!
//! Image polylines are cut at cusps and crossings into arcs; faces come
//! from walking the planar subdivision (each half-edge continues with the
//! next outgoing half-edge clockwise around its end). Positive cycles bound
//! faces, negative cycles are outer boundaries of contour components and
//! are attached to the face that encloses them.

use rayon::prelude::*;

use super::cusps::{detect_with, CuspMarker};
use super::fiber::count_with;
use super::trace::{trace_with, FoldCurve, Tracer};
use super::{Domain, MapSpec, NumericError};
use crate::analysis::propagate;
use crate::portrait::{
    signed_area, validate, winding_number as winding, Arc, Circle, Face, FiberLabel, Point, Portrait, Vertex,
    VertexKind,
};

/// Result of a full numeric run.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub curves: Vec<FoldCurve>,
    /// Cusp markers per curve.
    pub cusps: Vec<Vec<CuspMarker>>,
    pub portrait: Portrait,
    /// Face id, sample point and raw preimage count.
    pub samples: Vec<(String, [f64; 2], usize)>,
}

impl Extraction {
    pub fn cusp_count(&self) -> usize {
        self.cusps.iter().map(Vec::len).sum()
    }
}

struct Poly {
    pts: Vec<Point>,
    closed: bool,
    /// Indices of cusp points in `pts`.
    cusp_at: Vec<usize>,
}

impl Poly {
    fn segments(&self) -> usize {
        if self.closed {
            self.pts.len()
        } else {
            self.pts.len().saturating_sub(1)
        }
    }

    fn seg(&self, i: usize) -> (Point, Point) {
        (self.pts[i], self.pts[(i + 1) % self.pts.len()])
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        let m = self.segments();
        i.abs_diff(j) <= 1 || (self.closed && i.abs_diff(j) == m - 1)
    }
}

fn to_point(w: [f64; 2]) -> Point {
    Point::new(w[0], w[1])
}

/// Image polylines with cusp points inserted.
fn image_polys(curves: &[FoldCurve], cusps: &[Vec<CuspMarker>]) -> Vec<Poly> {
    curves
        .iter()
        .zip(cusps)
        .map(|(c, marks)| {
            let mut pts = Vec::with_capacity(c.image.len() + marks.len());
            let mut cusp_at = Vec::new();
            let mut k = 0;
            for (i, w) in c.image.iter().enumerate() {
                pts.push(to_point(*w));
                while k < marks.len() && marks[k].segment == i {
                    cusp_at.push(pts.len());
                    pts.push(to_point(marks[k].image));
                    k += 1;
                }
            }
            Poly {
                pts,
                closed: c.closed,
                cusp_at,
            }
        })
        .collect()
}

/// Proper intersection of segments `ab` and `cd` with parameters in [0, 1).
fn intersect(a: Point, b: Point, c: Point, d: Point) -> Option<(f64, f64)> {
    let r = b.sub(a);
    let s = d.sub(c);
    let denom = r.cross(s);
    if denom == 0.0 {
        return None;
    }
    let qp = c.sub(a);
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    ((0.0..1.0).contains(&t) && (0.0..1.0).contains(&u)).then_some((t, u))
}

struct CrossingMark {
    poly: usize,
    seg: usize,
    t: f64,
    node: usize,
}

#[derive(Clone, Copy)]
struct Node {
    pos: Point,
    kind: VertexKind,
}

/// Crossings between all polylines. Returns node records and marks.
fn find_crossings(
    polys: &[Poly],
    angle_min_deg: f64,
    first_node: usize,
) -> Result<(Vec<Node>, Vec<CrossingMark>), NumericError> {
    let segs: Vec<(usize, usize)> = polys
        .iter()
        .enumerate()
        .flat_map(|(p, poly)| (0..poly.segments()).map(move |i| (p, i)))
        .collect();
    let hits: Vec<(usize, usize, f64, usize, usize, f64)> = (0..segs.len())
        .into_par_iter()
        .flat_map_iter(|x| {
            let (pa, ia) = segs[x];
            let (a, b) = polys[pa].seg(ia);
            let (lo, hi) = (
                Point::new(a.x.min(b.x), a.y.min(b.y)),
                Point::new(a.x.max(b.x), a.y.max(b.y)),
            );
            segs[x + 1..]
                .iter()
                .filter_map(move |&(pb, ib)| {
                    if pa == pb && polys[pa].adjacent(ia, ib) {
                        return None;
                    }
                    let (c, d) = polys[pb].seg(ib);
                    if c.x.max(d.x) < lo.x || c.x.min(d.x) > hi.x || c.y.max(d.y) < lo.y || c.y.min(d.y) > hi.y {
                        return None;
                    }
                    intersect(a, b, c, d).map(|(t, u)| (pa, ia, t, pb, ib, u))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut nodes = Vec::new();
    let mut marks = Vec::new();
    for (pa, ia, t, pb, ib, u) in hits {
        let (a, b) = polys[pa].seg(ia);
        let (c, d) = polys[pb].seg(ib);
        let (r, s) = (b.sub(a), d.sub(c));
        let sin = (r.cross(s) / (r.norm() * s.norm())).abs().min(1.0);
        let angle = sin.asin().to_degrees();
        let at = a.add(r.scale(t));
        if angle < angle_min_deg {
            return Err(NumericError::Tangential {
                at: [at.x, at.y],
                angle_deg: angle,
            });
        }
        let node = first_node + nodes.len();
        nodes.push(Node {
            pos: at,
            kind: VertexKind::Crossing,
        });
        marks.push(CrossingMark {
            poly: pa,
            seg: ia,
            t,
            node,
        });
        marks.push(CrossingMark {
            poly: pb,
            seg: ib,
            t: u,
            node,
        });
    }
    Ok((nodes, marks))
}

/// A polyline between two nodes (or a node-free closed curve).
struct Piece {
    from: usize,
    to: usize,
    pts: Vec<Point>,
}

fn seg_dist(q: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    let t = if len2 == 0.0 {
        0.0
    } else {
        (q.sub(a).dot(ab) / len2).clamp(0.0, 1.0)
    };
    q.dist(a.add(ab.scale(t)))
}

struct Contour {
    segs: Vec<(Point, Point)>,
}

impl Contour {
    fn clearance(&self, q: Point) -> f64 {
        self.segs
            .iter()
            .map(|(a, b)| seg_dist(q, *a, *b))
            .fold(f64::INFINITY, f64::min)
    }
}

struct Cycle {
    pts: Vec<Point>,
    area: f64,
    component: usize,
}

struct Subdivision {
    /// Face index of each half-edge (2k: piece k forwards, 2k+1 backwards).
    half_face: Vec<usize>,
    /// Per face: outer cycle (None for the unbounded face) and holes.
    faces: Vec<(Option<usize>, Vec<usize>)>,
    cycles: Vec<Cycle>,
}

fn first_direction(pts: &[Point]) -> Point {
    let o = pts[0];
    let scale = pts.iter().map(|p| p.dist(o)).fold(0.0, f64::max);
    let far = pts
        .iter()
        .skip(1)
        .find(|p| p.dist(o) > 1e-9 * scale.max(1e-300))
        .copied()
        .unwrap_or(pts[pts.len() - 1]);
    far.sub(o)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Planar subdivision of node-to-node pieces and node-free loops.
fn subdivide(node_count: usize, pieces: &[Piece], loops: &[Vec<Point>]) -> Subdivision {
    let he_count = 2 * pieces.len();
    let he_pts = |h: usize| -> Vec<Point> {
        let p = &pieces[h / 2].pts;
        if h.is_multiple_of(2) {
            p.clone()
        } else {
            p.iter().rev().copied().collect()
        }
    };
    let origin = |h: usize| {
        if h.is_multiple_of(2) {
            pieces[h / 2].from
        } else {
            pieces[h / 2].to
        }
    };
    let mut outgoing: Vec<Vec<(f64, usize)>> = vec![Vec::new(); node_count];
    for h in 0..he_count {
        let d = first_direction(&he_pts(h));
        outgoing[origin(h)].push((d.y.atan2(d.x), h));
    }
    for list in &mut outgoing {
        list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }
    let next = |h: usize| -> usize {
        let twin = h ^ 1;
        let list = &outgoing[origin(twin)];
        let pos = list.iter().position(|&(_, x)| x == twin).expect("twin is outgoing");
        list[(pos + list.len() - 1) % list.len()].1
    };

    let mut parent: Vec<usize> = (0..node_count).collect();
    for p in pieces {
        let (a, b) = (find(&mut parent, p.from), find(&mut parent, p.to));
        parent[a] = b;
    }

    let mut cycles: Vec<Cycle> = Vec::new();
    let mut he_cycle = vec![usize::MAX; he_count];
    for start in 0..he_count {
        if he_cycle[start] != usize::MAX {
            continue;
        }
        let mut pts = Vec::new();
        let mut h = start;
        loop {
            he_cycle[h] = cycles.len();
            let seg = he_pts(h);
            pts.extend_from_slice(&seg[..seg.len() - 1]);
            h = next(h);
            if h == start {
                break;
            }
        }
        let component = find(&mut parent, pieces[start / 2].from);
        cycles.push(Cycle {
            area: signed_area(&pts),
            pts,
            component,
        });
    }
    // Each loop contributes its inside (counter-clockwise) and outside cycle.
    let mut loop_cycles = Vec::new();
    for (k, l) in loops.iter().enumerate() {
        let inner = cycles.len();
        cycles.push(Cycle {
            area: signed_area(l),
            pts: l.clone(),
            component: node_count + k,
        });
        let rev: Vec<Point> = l.iter().rev().copied().collect();
        cycles.push(Cycle {
            area: signed_area(&rev),
            pts: rev,
            component: node_count + k,
        });
        loop_cycles.push((inner, inner + 1));
    }

    let mut faces: Vec<(Option<usize>, Vec<usize>)> = vec![(None, Vec::new())];
    let mut cycle_face = vec![0usize; cycles.len()];
    for (i, c) in cycles.iter().enumerate() {
        if c.area > 0.0 {
            cycle_face[i] = faces.len();
            faces.push((Some(i), Vec::new()));
        }
    }
    for i in 0..cycles.len() {
        if cycles[i].area > 0.0 {
            continue;
        }
        let q = cycles[i].pts[0];
        let mut best: Option<(f64, usize)> = None;
        for (j, c) in cycles.iter().enumerate() {
            if c.area > 0.0
                && c.component != cycles[i].component
                && winding(q, &c.pts) != 0
                && best.is_none_or(|(a, _)| c.area < a)
            {
                best = Some((c.area, j));
            }
        }
        let f = best.map_or(0, |(_, j)| cycle_face[j]);
        cycle_face[i] = f;
        faces[f].1.push(i);
    }
    let mut half_face: Vec<usize> = he_cycle.iter().map(|&c| cycle_face[c]).collect();
    for (inner, outer) in loop_cycles {
        half_face.push(cycle_face[inner]);
        half_face.push(cycle_face[outer]);
    }
    Subdivision {
        half_face,
        faces,
        cycles,
    }
}

fn sample_face(sub: &Subdivision, face: usize, contour: &Contour) -> Option<(Point, f64)> {
    let (outer, holes) = &sub.faces[face];
    let outer = &sub.cycles[(*outer)?].pts;
    let inside = |q: Point| winding(q, outer) != 0 && holes.iter().all(|&h| winding(q, &sub.cycles[h].pts) == 0);
    let (mut lo, mut hi) = (outer[0], outer[0]);
    for p in outer {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let mut best: Option<(Point, f64)> = None;
    let consider = |q: Point, best: &mut Option<(Point, f64)>| {
        if inside(q) {
            let c = contour.clearance(q);
            if best.is_none_or(|(_, b)| c > b) {
                *best = Some((q, c));
            }
        }
    };
    let n = 48;
    let (dx, dy) = ((hi.x - lo.x) / n as f64, (hi.y - lo.y) / n as f64);
    for i in 0..n {
        for j in 0..n {
            consider(
                Point::new(lo.x + (i as f64 + 0.5) * dx, lo.y + (j as f64 + 0.5) * dy),
                &mut best,
            );
        }
    }
    let (mut dx, mut dy) = (dx, dy);
    for _ in 0..3 {
        let Some((c, _)) = best else { break };
        dx /= 4.0;
        dy /= 4.0;
        for i in -8..=8 {
            for j in -8..=8 {
                consider(Point::new(c.x + i as f64 * dx, c.y + j as f64 * dy), &mut best);
            }
        }
    }
    best
}

/// Trace, detect cusps, cut the contour into a portrait and label its
/// faces by preimage counts.
///
/// In bounded mode only the fans around cusps are built: each cusp gets a
/// loop arc enclosing its wedge, labeled relative to the outside (0 and 2)
/// after checking that the sampled counts differ by exactly 2.
pub fn extract_portrait(spec: &MapSpec) -> Result<Extraction, NumericError> {
    let tracer = Tracer::new(spec);
    let curves = trace_with(&tracer)?;
    let cusps: Vec<Vec<CuspMarker>> = curves
        .iter()
        .map(|c| detect_with(&tracer, c))
        .collect::<Result<_, _>>()?;
    let polys = image_polys(&curves, &cusps);
    let contour = Contour {
        segs: polys
            .iter()
            .flat_map(|p| (0..p.segments()).map(move |i| p.seg(i)))
            .collect(),
    };
    let (portrait, samples) = match spec.domain {
        Domain::Closed => closed_portrait(&tracer, &polys, &contour)?,
        Domain::Bounded => fan_portrait(&tracer, &polys, &contour)?,
    };
    Ok(Extraction {
        curves,
        cusps,
        portrait,
        samples,
    })
}

type Samples = Vec<(String, [f64; 2], usize)>;

fn closed_portrait(tracer: &Tracer, polys: &[Poly], contour: &Contour) -> Result<(Portrait, Samples), NumericError> {
    let spec = tracer.spec;
    let mut nodes: Vec<Node> = Vec::new();
    let mut cusp_node: Vec<Vec<usize>> = Vec::new();
    for p in polys {
        let mut ids = Vec::new();
        for &i in &p.cusp_at {
            ids.push(nodes.len());
            nodes.push(Node {
                pos: p.pts[i],
                kind: VertexKind::Cusp,
            });
        }
        cusp_node.push(ids);
    }
    let (crossings, marks) = find_crossings(polys, spec.tol.angle_min, nodes.len())?;
    nodes.extend(crossings);

    let mut pieces: Vec<Piece> = Vec::new();
    let mut loops: Vec<Vec<Point>> = Vec::new();
    for (pi, p) in polys.iter().enumerate() {
        // Rebuild the polyline with crossing points; remember node indices.
        let mut pts = Vec::new();
        let mut at: Vec<(usize, usize)> = Vec::new();
        let mut on_seg: Vec<&CrossingMark> = marks.iter().filter(|m| m.poly == pi).collect();
        on_seg.sort_by(|a, b| a.seg.cmp(&b.seg).then(a.t.total_cmp(&b.t)));
        let mut k = 0;
        for i in 0..p.pts.len() {
            if let Some(c) = p.cusp_at.iter().position(|&j| j == i) {
                at.push((pts.len(), cusp_node[pi][c]));
            }
            pts.push(p.pts[i]);
            while k < on_seg.len() && on_seg[k].seg == i {
                at.push((pts.len(), on_seg[k].node));
                pts.push(nodes[on_seg[k].node].pos);
                k += 1;
            }
        }
        if at.is_empty() {
            let mut l = pts;
            if signed_area(&l) < 0.0 {
                l.reverse();
            }
            loops.push(l);
            continue;
        }
        for w in 0..at.len() {
            let (i0, n0) = at[w];
            let (i1, n1) = at[(w + 1) % at.len()];
            let seg: Vec<Point> = if w + 1 < at.len() {
                pts[i0..=i1].to_vec()
            } else {
                pts[i0..].iter().chain(pts[..=i1].iter()).copied().collect()
            };
            pieces.push(Piece {
                from: n0,
                to: n1,
                pts: seg,
            });
        }
    }

    let sub = subdivide(nodes.len(), &pieces, &loops);
    let face_ids: Vec<String> = (0..sub.faces.len()).map(|f| format!("f{f}")).collect();
    let points: Vec<Option<(Point, f64)>> = (1..sub.faces.len()).map(|f| sample_face(&sub, f, contour)).collect();
    let mut targets = Vec::new();
    for (k, s) in points.iter().enumerate() {
        let id = &face_ids[k + 1];
        match s {
            Some((q, c)) if *c > spec.tol.clearance => targets.push((id.clone(), [q.x, q.y])),
            Some((_, c)) => {
                return Err(NumericError::FaceSampling {
                    face: id.clone(),
                    reason: format!("best clearance {c:.3e} is below the tolerance"),
                })
            }
            None => {
                return Err(NumericError::FaceSampling {
                    face: id.clone(),
                    reason: "no interior sample found".to_string(),
                })
            }
        }
    }
    let counts: Vec<usize> = targets
        .par_iter()
        .map(|(_, w)| count_with(&tracer.c, spec, *w).map(|r| r.count))
        .collect::<Result<_, _>>()?;
    let mut samples: Samples = Vec::new();
    let mut p = Portrait::new(2);
    p.faces.push(Face {
        id: face_ids[0].clone(),
        label: Some(FiberLabel::Count(0)),
        unbounded: true,
    });
    for ((id, w), n) in targets.into_iter().zip(counts) {
        p.faces.push(Face {
            id: id.clone(),
            label: Some(FiberLabel::Count(n as i64)),
            unbounded: false,
        });
        samples.push((id, w, n));
    }
    for (k, n) in nodes.iter().enumerate() {
        p.vertices.push(Vertex {
            id: format!("v{}", k + 1),
            kind: n.kind,
            position: Some(n.pos),
            index: None,
            chi: None,
        });
    }
    for (k, piece) in pieces.iter().enumerate() {
        p.arcs.push(Arc {
            id: format!("a{}", k + 1),
            from: format!("v{}", piece.from + 1),
            to: format!("v{}", piece.to + 1),
            left: face_ids[sub.half_face[2 * k]].clone(),
            right: face_ids[sub.half_face[2 * k + 1]].clone(),
            chi: None,
            points: Some(piece.pts.clone()),
        });
    }
    let base = 2 * pieces.len();
    for (k, l) in loops.iter().enumerate() {
        p.circles.push(Circle {
            id: format!("c{}", k + 1),
            left: face_ids[sub.half_face[base + 2 * k]].clone(),
            right: face_ids[sub.half_face[base + 2 * k + 1]].clone(),
            chi: None,
            points: Some(l.clone()),
        });
    }
    check(&p)?;
    Ok((p, samples))
}

fn check(p: &Portrait) -> Result<(), NumericError> {
    let violations = validate(p);
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(NumericError::Inconsistent(text.join("; ")));
    }
    propagate(p).map_err(|e| NumericError::Inconsistent(e.to_string()))?;
    Ok(())
}

/// Point on the ray `from + r d`, `0 < r <= limit`, furthest from the
/// contour, where `limit` is also clipped at the first contour hit.
fn ray_sample(from: Point, d: Point, limit: f64, contour: &Contour, skip: &[(Point, Point)]) -> (Point, f64) {
    let mut reach = limit;
    let end = from.add(d.scale(limit));
    for (a, b) in &contour.segs {
        if skip.iter().any(|(c, e)| c == a && e == b) {
            continue;
        }
        if let Some((t, _)) = intersect(from, end, *a, *b) {
            if t > 1e-9 {
                reach = reach.min(t * limit);
            }
        }
    }
    let mut best = (from, 0.0);
    for k in 1..=400 {
        let q = from.add(d.scale(reach * k as f64 / 400.0));
        let c = contour.clearance(q);
        if c > best.1 {
            best = (q, c);
        }
    }
    best
}

fn fan_portrait(tracer: &Tracer, polys: &[Poly], contour: &Contour) -> Result<(Portrait, Samples), NumericError> {
    let spec = tracer.spec;
    let mut p = Portrait::new(2);
    p.faces.push(Face {
        id: "f0".to_string(),
        label: Some(FiberLabel::Count(0)),
        unbounded: true,
    });
    let mut samples = Vec::new();
    let diameter = {
        let all: Vec<Point> = polys.iter().flat_map(|q| q.pts.iter().copied()).collect();
        let (mut lo, mut hi) = (all[0], all[0]);
        for q in &all {
            lo = Point::new(lo.x.min(q.x), lo.y.min(q.y));
            hi = Point::new(hi.x.max(q.x), hi.y.max(q.y));
        }
        hi.dist(lo)
    };
    let mut k = 0;
    for (pi, poly) in polys.iter().enumerate() {
        for &ci in &poly.cusp_at {
            k += 1;
            let m = poly.pts.len();
            if !poly.closed && (ci == 0 || ci + 1 >= m) {
                continue;
            }
            let cusp = poly.pts[ci];
            let prev = poly.pts[(ci + m - 1) % m];
            let next = poly.pts[(ci + 1) % m];
            let (d1, d2) = (prev.sub(cusp), next.sub(cusp));
            let d = d1.scale(1.0 / d1.norm()).add(d2.scale(1.0 / d2.norm()));
            let d = d.scale(1.0 / d.norm());
            let others = polys
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != pi)
                .flat_map(|(_, q)| (0..q.segments()).map(move |i| q.seg(i)))
                .map(|(a, b)| seg_dist(cusp, a, b))
                .fold(f64::INFINITY, f64::min);
            let limit = if others.is_finite() {
                2.0 * others
            } else {
                0.25 * diameter
            };
            let skip = [(prev, cusp), (cusp, next)];
            let (inner, ci_clear) = ray_sample(cusp, d, limit, contour, &skip);
            let (outer, co_clear) = ray_sample(cusp, d.scale(-1.0), limit, contour, &skip);
            let wedge_id = format!("f{k}");
            for (id, c) in [(&wedge_id, ci_clear), (&"f0".to_string(), co_clear)] {
                if c <= spec.tol.clearance {
                    return Err(NumericError::FaceSampling {
                        face: id.clone(),
                        reason: format!("best clearance {c:.3e} near cusp is below the tolerance"),
                    });
                }
            }
            let n_in = count_with(&tracer.c, spec, [inner.x, inner.y])?.count;
            let n_out = count_with(&tracer.c, spec, [outer.x, outer.y])?.count;
            if n_in != n_out + 2 {
                return Err(NumericError::Inconsistent(format!(
                    "cusp wedge has {n_in} preimages against {n_out} outside; expected a difference of 2"
                )));
            }
            samples.push((wedge_id.clone(), [inner.x, inner.y], n_in));
            samples.push((format!("f0@v{k}"), [outer.x, outer.y], n_out));
            p.vertices.push(Vertex {
                id: format!("v{k}"),
                kind: VertexKind::Cusp,
                position: Some(cusp),
                index: None,
                chi: None,
            });
            p.arcs.push(Arc {
                id: format!("a{k}"),
                from: format!("v{k}"),
                to: format!("v{k}"),
                left: wedge_id.clone(),
                right: "f0".to_string(),
                chi: None,
                // The image curve read from the cusp round to itself, closed
                // by the chord where it leaves the box.
                points: Some(poly.pts[ci..].iter().chain(&poly.pts[..=ci]).copied().collect()),
            });
            p.faces.push(Face {
                id: wedge_id,
                label: Some(FiberLabel::Count(2)),
                unbounded: false,
            });
        }
    }
    check(&p)?;
    Ok((p, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{stratified_chi, thom_parity, ThomVerdict};
    use crate::numeric::fixtures;

    fn labels(p: &Portrait) -> Vec<i64> {
        let mut v: Vec<i64> = p.faces.iter().map(|f| f.label.unwrap().value()).collect();
        v.sort();
        v
    }

    #[test]
    fn sphere() {
        let e = extract_portrait(&fixtures::sphere()).unwrap();
        let p = &e.portrait;
        assert!(p.vertices.is_empty() && p.arcs.is_empty());
        assert_eq!(p.circles.len(), 1);
        assert_eq!(labels(p), vec![0, 2]);
        assert_eq!(stratified_chi(p, None).unwrap(), 2);
    }

    #[test]
    fn torus() {
        let e = extract_portrait(&fixtures::torus()).unwrap();
        assert_eq!(e.portrait.circles.len(), 2);
        assert_eq!(labels(&e.portrait), vec![0, 0, 2]);
        assert_eq!(stratified_chi(&e.portrait, None).unwrap(), 0);
    }

    #[test]
    fn tilted_torus() {
        let e = extract_portrait(&fixtures::tilted_torus()).unwrap();
        assert_eq!(e.portrait.cusp_count(), 4);
        let chi = stratified_chi(&e.portrait, None).unwrap();
        assert_eq!(chi, 0);
        assert_eq!(thom_parity(&e.portrait, chi), ThomVerdict::Pass);
    }

    #[test]
    fn twice_fold_fan() {
        let e = extract_portrait(&fixtures::twice_fold()).unwrap();
        assert_eq!(e.cusp_count(), 1);
        assert_eq!(e.portrait.arcs.len(), 1);
        assert_eq!(stratified_chi(&e.portrait, None).unwrap(), 1);
    }

    #[test]
    fn winding_and_area() {
        let sq = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert_eq!(signed_area(&sq), 1.0);
        assert_eq!(winding(Point::new(0.5, 0.5), &sq), 1);
        assert_eq!(winding(Point::new(1.5, 0.5), &sq), 0);
    }
}
