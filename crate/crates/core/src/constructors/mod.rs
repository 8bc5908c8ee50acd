//! Template portraits: closed orientable surfaces, toric surfaces,
//! projective planes, sphere bundles and lifts of Morse functions.

mod morse_lift;
mod toric;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::portrait::{Arc, Circle, Face, FiberLabel, Point, Portrait, Vertex, VertexKind};

pub use morse_lift::morse_lift;
pub use toric::toric_portrait;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not strictly convex at vertex ({}, {})", .0.0, .0.1)]
    NonConvex((i64, i64)),
    #[error("Delzant condition fails at vertex ({}, {}): edge determinant {det}", .vertex.0, .vertex.1)]
    Delzant { vertex: (i64, i64), det: i64 },
    #[error("critical sequence invalid at position {position}: {reason}")]
    MorseSequence { position: usize, reason: String },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// Closed counter-clockwise polyline approximating an ellipse (without the
/// repeated start point).
pub(crate) fn ellipse_points(c: Point, a: f64, b: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            Point::new(c.x + a * t.cos(), c.y + b * t.sin())
        })
        .collect()
}

fn face(id: &str, label: FiberLabel, unbounded: bool) -> Face {
    Face {
        id: id.to_string(),
        label: Some(label),
        unbounded,
    }
}

/// One outer circle holding `g` holes. Outer face 0, body 2, holes 0.
pub fn genus_surface_portrait(g: usize) -> Portrait {
    let mut p = Portrait::new(2);
    let spacing = 2.5;
    let a = 1.5 + spacing * g as f64 / 2.0;
    p.faces.push(face("f0", FiberLabel::Count(0), true));
    p.faces.push(face("f1", FiberLabel::Count(2), false));
    p.circles.push(Circle {
        id: "c1".into(),
        left: "f1".into(),
        right: "f0".into(),
        chi: None,
        points: Some(ellipse_points(Point::new(0.0, 0.0), a, 2.0, 128)),
    });
    for i in 0..g {
        let x = (i as f64 - (g as f64 - 1.0) / 2.0) * spacing;
        let hole = format!("f{}", i + 2);
        p.circles.push(Circle {
            id: format!("c{}", i + 2),
            left: hole.clone(),
            right: "f1".into(),
            chi: None,
            points: Some(ellipse_points(Point::new(x, 0.0), 0.8, 0.8, 64)),
        });
        p.faces.push(face(&hole, FiberLabel::Count(0), false));
    }
    p
}

/// The three projective planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
    Quaternion,
}

impl FromStr for Field {
    type Err = ConstructError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R" | "r" => Ok(Field::Real),
            "C" | "c" => Ok(Field::Complex),
            "H" | "h" => Ok(Field::Quaternion),
            _ => Err(ConstructError::Parameter(format!(
                "unknown field '{s}', expected R, C or H"
            ))),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "R",
            Field::Complex => "C",
            Field::Quaternion => "H",
        })
    }
}

pub fn projective_plane_portrait(k: Field) -> Portrait {
    let triangle = [(0, 0), (1, 0), (0, 1)];
    match k {
        Field::Complex => toric_portrait(&triangle).expect("the standard triangle is Delzant"),
        Field::Quaternion => {
            let mut p = toric_portrait(&triangle).expect("the standard triangle is Delzant");
            p.dim = 8;
            for v in &mut p.vertices {
                v.index = Some(3);
            }
            p
        }
        Field::Real => real_projective_plane(),
    }
}

/// Point of the fish-shaped contour: a cusp at `t = 0` and a self-crossing
/// at `t = 2pi/3, 4pi/3`.
fn fish(t: f64) -> Point {
    let c = t.cos();
    Point::new(0.5 - 0.6 * (1.0 - c), 0.5 * t.sin() * (1.0 - c) * (c + 0.5))
}

fn fish_arc(t0: f64, t1: f64, n: usize) -> Vec<Point> {
    (0..=n).map(|k| fish(t0 + (t1 - t0) * k as f64 / n as f64)).collect()
}

/// One cusp and one crossing inside a circle: counts 2 between the curves,
/// 4 in the cusp wedge, 0 in the loop.
fn real_projective_plane() -> Portrait {
    let mut p = Portrait::new(2);
    let third = 2.0 * PI / 3.0;
    let cusp = fish(0.0);
    let crossing = fish(third);
    p.vertices.push(Vertex {
        id: "v1".into(),
        kind: VertexKind::Cusp,
        position: Some(cusp),
        index: None,
        chi: None,
    });
    p.vertices.push(Vertex {
        id: "v2".into(),
        kind: VertexKind::Crossing,
        position: Some(crossing),
        index: None,
        chi: None,
    });
    let arcs = [
        ("a1", "v1", "v2", "f2", "f1", fish_arc(0.0, third, 64)),
        ("a2", "v2", "v2", "f1", "f3", fish_arc(third, 2.0 * third, 64)),
        ("a3", "v2", "v1", "f2", "f1", fish_arc(2.0 * third, 2.0 * PI, 64)),
    ];
    for (id, from, to, left, right, mut pts) in arcs {
        // Snap ends onto the vertex positions.
        let n = pts.len();
        pts[0] = if from == "v1" { cusp } else { crossing };
        pts[n - 1] = if to == "v1" { cusp } else { crossing };
        p.arcs.push(Arc {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            left: left.into(),
            right: right.into(),
            chi: None,
            points: Some(pts),
        });
    }
    p.circles.push(Circle {
        id: "c1".into(),
        left: "f1".into(),
        right: "f0".into(),
        chi: None,
        points: Some(ellipse_points(Point::new(-0.1, 0.0), 1.5, 1.5, 128)),
    });
    p.faces.push(face("f0", FiberLabel::Count(0), true));
    p.faces.push(face("f1", FiberLabel::Count(2), false));
    p.faces.push(face("f2", FiberLabel::Count(4), false));
    p.faces.push(face("f3", FiberLabel::Count(0), false));
    p
}

/// `S^p`-bundle over `S^q` with a section, as a single fold circle whose
/// inner face carries fiber Euler characteristic `chi(S^p) chi(S^q)`.
/// For `p = q = 1` this is the torus portrait.
pub fn sphere_bundle_portrait(p: u32, q: u32) -> Result<Portrait, ConstructError> {
    if p == 0 || q == 0 {
        return Err(ConstructError::Parameter(format!("need p, q >= 1, got ({p}, {q})")));
    }
    if p + q == 2 {
        return Ok(genus_surface_portrait(1));
    }
    let sphere_chi = |k: u32| 1 + if k.is_multiple_of(2) { 1 } else { -1 };
    let inner = sphere_chi(p) * sphere_chi(q);
    let mut out = Portrait::new(p + q);
    out.faces.push(face("f0", FiberLabel::Chi(0), true));
    out.faces.push(face("f1", FiberLabel::Chi(inner), false));
    out.circles.push(Circle {
        id: "c1".into(),
        left: "f1".into(),
        right: "f0".into(),
        chi: Some(inner / 2),
        points: Some(ellipse_points(Point::new(0.0, 0.0), 1.0, 1.0, 64)),
    });
    Ok(out)
}
