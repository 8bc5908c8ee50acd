//! Combinatorial planar portraits: the image of a stable map together with
//! its apparent contour, stored as a planar map with fiber labels on faces.
//!
//! Geometry (vertex positions, arc polylines) is optional everywhere. Every
//! combinatorial operation works on ids alone.

mod format;
mod validate;

use std::collections::{BTreeMap, HashMap};

pub(crate) use format::natural_cmp;
pub use format::{parse_portrait, serialize_portrait, FormatError};
pub use validate::{validate, Rule, Violation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

// Plain methods keep the geometry code free of operator imports.
#[allow(clippy::should_implement_trait)]
impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Cusp,
    Crossing,
}

impl VertexKind {
    pub fn degree(self) -> usize {
        match self {
            VertexKind::Cusp => 2,
            VertexKind::Crossing => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub kind: VertexKind,
    pub position: Option<Point>,
    /// Cusp index, stored as the canonical representative `min(k, n-2-k)`.
    pub index: Option<u32>,
    /// Fiber Euler characteristic over this vertex (used when `dim >= 3`).
    pub chi: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub id: String,
    pub from: String,
    pub to: String,
    pub left: String,
    pub right: String,
    pub chi: Option<i64>,
    pub points: Option<Vec<Point>>,
}

/// A closed fold-image curve carrying no vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Circle {
    pub id: String,
    /// Inside, when geometry is present.
    pub left: String,
    pub right: String,
    pub chi: Option<i64>,
    /// Closed polyline; the last point is not repeated.
    pub points: Option<Vec<Point>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberLabel {
    /// Number of preimage points (surfaces).
    Count(i64),
    /// Euler characteristic of the regular fiber (dimension 3 and up).
    Chi(i64),
}

impl FiberLabel {
    pub fn value(self) -> i64 {
        match self {
            FiberLabel::Count(v) | FiberLabel::Chi(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub id: String,
    pub label: Option<FiberLabel>,
    pub unbounded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Portrait {
    pub dim: u32,
    pub vertices: Vec<Vertex>,
    pub arcs: Vec<Arc>,
    pub circles: Vec<Circle>,
    pub faces: Vec<Face>,
}

/// Reference to a one-dimensional contour element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Arc(usize),
    Circle(usize),
}

/// Signed area of a closed polyline (positive when counter-clockwise).
pub fn signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Winding number of a closed polyline around `q`.
pub fn winding_number(q: Point, pts: &[Point]) -> i32 {
    let n = pts.len();
    let mut w = 0;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let side = b.sub(a).cross(q.sub(a));
        if a.y <= q.y {
            if b.y > q.y && side > 0.0 {
                w += 1;
            }
        } else if b.y <= q.y && side < 0.0 {
            w -= 1;
        }
    }
    w
}

/// Canonical cusp index under the identification `k <-> (n-2) - k`.
pub fn canonical_cusp_index(dim: u32, k: u32) -> u32 {
    let top = dim.saturating_sub(2);
    if k > top {
        k
    } else {
        k.min(top - k)
    }
}

impl Portrait {
    pub fn new(dim: u32) -> Self {
        Portrait {
            dim,
            vertices: Vec::new(),
            arcs: Vec::new(),
            circles: Vec::new(),
            faces: Vec::new(),
        }
    }

    pub fn face_index(&self) -> HashMap<&str, usize> {
        self.faces.iter().enumerate().map(|(i, f)| (f.id.as_str(), i)).collect()
    }

    pub fn vertex_index(&self) -> HashMap<&str, usize> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect()
    }

    pub fn face(&self, id: &str) -> Option<&Face> {
        self.faces.iter().find(|f| f.id == id)
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn unbounded_face(&self) -> Option<&Face> {
        self.faces.iter().find(|f| f.unbounded)
    }

    pub fn cusp_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.kind == VertexKind::Cusp).count()
    }

    pub fn crossing_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.kind == VertexKind::Crossing).count()
    }

    pub fn has_geometry(&self) -> bool {
        self.arcs.iter().all(|a| a.points.is_some())
            && self.circles.iter().all(|c| c.points.is_some())
            && self.vertices.iter().all(|v| v.position.is_some())
    }

    pub fn element_faces(&self, e: Element) -> (&str, &str) {
        match e {
            Element::Arc(i) => (&self.arcs[i].left, &self.arcs[i].right),
            Element::Circle(i) => (&self.circles[i].left, &self.circles[i].right),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.arcs.len())
            .map(Element::Arc)
            .chain((0..self.circles.len()).map(Element::Circle))
    }

    /// Number of arc-ends incident to each vertex (a loop counts twice).
    pub fn vertex_degrees(&self) -> HashMap<&str, usize> {
        let mut deg: HashMap<&str, usize> = self.vertices.iter().map(|v| (v.id.as_str(), 0)).collect();
        for a in &self.arcs {
            for end in [&a.from, &a.to] {
                if let Some(d) = deg.get_mut(end.as_str()) {
                    *d += 1;
                }
            }
        }
        deg
    }

    /// Distinct faces adjacent to a vertex, read from the sides of its arcs.
    pub fn local_faces(&self, vertex_id: &str) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for a in &self.arcs {
            if a.from == vertex_id || a.to == vertex_id {
                for f in [a.left.as_str(), a.right.as_str()] {
                    if !out.contains(&f) {
                        out.push(f);
                    }
                }
            }
        }
        out
    }

    /// Adjacency pairs `(face, face, element)` across every arc and circle.
    pub fn face_adjacency(&self) -> Vec<(usize, usize, Element)> {
        let idx = self.face_index();
        self.elements()
            .filter_map(|e| {
                let (l, r) = self.element_faces(e);
                Some((*idx.get(l)?, *idx.get(r)?, e))
            })
            .collect()
    }

    /// Connected components of the boundary of a face, each given as the
    /// contour elements it contains. Arcs are joined through shared vertices.
    pub fn boundary_components(&self, face_id: &str) -> Vec<Vec<Element>> {
        let bordering: Vec<Element> = self
            .elements()
            .filter(|&e| {
                let (l, r) = self.element_faces(e);
                l == face_id || r == face_id
            })
            .collect();
        let mut parent: Vec<usize> = (0..bordering.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let mut by_vertex: HashMap<&str, usize> = HashMap::new();
        for (k, e) in bordering.iter().enumerate() {
            if let Element::Arc(i) = e {
                let a = &self.arcs[*i];
                for end in [a.from.as_str(), a.to.as_str()] {
                    match by_vertex.get(end) {
                        Some(&other) => {
                            let (ra, rb) = (find(&mut parent, k), find(&mut parent, other));
                            parent[ra] = rb;
                        }
                        None => {
                            by_vertex.insert(end, k);
                        }
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<Element>> = BTreeMap::new();
        for (k, e) in bordering.iter().enumerate() {
            let r = find(&mut parent, k);
            groups.entry(r).or_default().push(*e);
        }
        groups.into_values().collect()
    }

    /// Compactly supported Euler characteristic of each face as an open
    /// planar region: `2 - b` when bounded, `1 - b` for the unbounded face,
    /// where `b` counts boundary components.
    pub fn faces_chi_c(&self) -> BTreeMap<String, i64> {
        self.faces
            .iter()
            .map(|f| {
                let b = self.boundary_components(&f.id).len() as i64;
                let chi = if f.unbounded { 1 - b } else { 2 - b };
                (f.id.clone(), chi)
            })
            .collect()
    }

    /// Connected components of the contour: vertices joined by arcs, plus
    /// one component per vertex-free circle.
    pub fn contour_components(&self) -> usize {
        let vidx = self.vertex_index();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for a in &self.arcs {
            if let (Some(&u), Some(&v)) = (vidx.get(a.from.as_str()), vidx.get(a.to.as_str())) {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                parent[ru] = rv;
            }
        }
        let mut roots: Vec<usize> = (0..self.vertices.len()).map(|i| find(&mut parent, i)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len() + self.circles.len()
    }

    /// Face label values as counts, if every face carries a `Count` label.
    pub fn pinned_counts(&self) -> BTreeMap<String, i64> {
        self.faces
            .iter()
            .filter_map(|f| match f.label {
                Some(FiberLabel::Count(c)) => Some((f.id.clone(), c)),
                _ => None,
            })
            .collect()
    }
}
