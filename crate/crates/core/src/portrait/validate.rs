use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{FiberLabel, Portrait, VertexKind};

const GEOMETRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Dimension,
    DuplicateId,
    UnboundedFaceCount,
    UnknownReference,
    VertexDegree,
    CuspIndex,
    EulerFormula,
    WalkClosure,
    OuterFiber,
    FiberParity,
    NegativeFiber,
    LabelKind,
    Geometry,
    DetachedFace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub rule: Rule,
    /// Id of the offending element, or the empty string for global rules.
    pub element: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.element.is_empty() {
            write!(f, "{:?}: {}", self.rule, self.message)
        } else {
            write!(f, "{:?} at {}: {}", self.rule, self.element, self.message)
        }
    }
}

struct Collector(Vec<Violation>);

impl Collector {
    fn push(&mut self, rule: Rule, element: &str, message: impl Into<String>) {
        self.0.push(Violation {
            rule,
            element: element.to_string(),
            message: message.into(),
        });
    }
}

/// Check every structural invariant of a portrait. Returns an empty list
/// iff the portrait is well formed.
pub fn validate(p: &Portrait) -> Vec<Violation> {
    let mut out = Collector(Vec::new());

    if p.dim < 2 {
        out.push(Rule::Dimension, "", format!("dimension {} is below 2", p.dim));
    }

    let mut seen = HashSet::new();
    let all_ids = p
        .vertices
        .iter()
        .map(|v| &v.id)
        .chain(p.arcs.iter().map(|a| &a.id))
        .chain(p.circles.iter().map(|c| &c.id))
        .chain(p.faces.iter().map(|f| &f.id));
    for id in all_ids {
        if !seen.insert(id.as_str()) {
            out.push(Rule::DuplicateId, id, "id declared more than once");
        }
    }

    let unbounded = p.faces.iter().filter(|f| f.unbounded).count();
    if unbounded != 1 {
        out.push(
            Rule::UnboundedFaceCount,
            "",
            format!("expected exactly one unbounded face, found {unbounded}"),
        );
    }

    let vertex_ids: HashSet<&str> = p.vertices.iter().map(|v| v.id.as_str()).collect();
    let face_ids: HashSet<&str> = p.faces.iter().map(|f| f.id.as_str()).collect();
    let mut references_ok = true;
    for a in &p.arcs {
        for v in [&a.from, &a.to] {
            if !vertex_ids.contains(v.as_str()) {
                references_ok = false;
                out.push(Rule::UnknownReference, &a.id, format!("endpoint {v} is not a vertex"));
            }
        }
        for f in [&a.left, &a.right] {
            if !face_ids.contains(f.as_str()) {
                references_ok = false;
                out.push(Rule::UnknownReference, &a.id, format!("side {f} is not a face"));
            }
        }
    }
    for c in &p.circles {
        for f in [&c.left, &c.right] {
            if !face_ids.contains(f.as_str()) {
                references_ok = false;
                out.push(Rule::UnknownReference, &c.id, format!("side {f} is not a face"));
            }
        }
    }

    let degrees = p.vertex_degrees();
    for v in &p.vertices {
        let d = degrees[v.id.as_str()];
        if d != v.kind.degree() {
            out.push(
                Rule::VertexDegree,
                &v.id,
                format!("{:?} vertex has {d} arc-ends, expected {}", v.kind, v.kind.degree()),
            );
        }
        if let Some(k) = v.index {
            if v.kind != VertexKind::Cusp {
                out.push(Rule::CuspIndex, &v.id, "index given on a crossing");
            } else if k > p.dim.saturating_sub(2) {
                out.push(
                    Rule::CuspIndex,
                    &v.id,
                    format!("cusp index {k} outside [0, {}]", p.dim.saturating_sub(2)),
                );
            } else if k != super::canonical_cusp_index(p.dim, k) {
                out.push(Rule::CuspIndex, &v.id, format!("cusp index {k} is not canonical"));
            }
        }
    }

    if references_ok {
        // Circles count as one virtual vertex and one edge each.
        let v = (p.vertices.len() + p.circles.len()) as i64;
        let e = (p.arcs.len() + p.circles.len()) as i64;
        let f = p.faces.len() as i64;
        let c = p.contour_components() as i64;
        if v - e + f != 1 + c {
            out.push(
                Rule::EulerFormula,
                "",
                format!(
                    "V - E + F = {v} - {e} + {f} = {}, expected {} for {c} contour components",
                    v - e + f,
                    1 + c
                ),
            );
        }

        // Every boundary walk of a face passes each vertex an even number of times.
        for face in &p.faces {
            let mut ends: HashMap<&str, usize> = HashMap::new();
            for a in &p.arcs {
                let sides = (a.left == face.id) as usize + (a.right == face.id) as usize;
                if sides == 0 {
                    continue;
                }
                *ends.entry(a.from.as_str()).or_default() += sides;
                *ends.entry(a.to.as_str()).or_default() += sides;
            }
            let mut odd: Vec<&str> = ends.iter().filter(|(_, &n)| n % 2 == 1).map(|(v, _)| *v).collect();
            odd.sort_unstable();
            for v in odd {
                out.push(
                    Rule::WalkClosure,
                    &face.id,
                    format!("boundary walk does not close at {v}"),
                );
            }
        }

        if p.faces.len() > 1 {
            for face in &p.faces {
                if p.boundary_components(&face.id).is_empty() {
                    out.push(Rule::DetachedFace, &face.id, "face borders no arc or circle");
                }
            }
        }
    }

    for face in &p.faces {
        match face.label {
            None => {}
            Some(FiberLabel::Count(n)) => {
                if p.dim != 2 {
                    out.push(
                        Rule::LabelKind,
                        &face.id,
                        "point-count label on a portrait of dimension >= 3",
                    );
                }
                if n < 0 {
                    out.push(Rule::NegativeFiber, &face.id, format!("negative fiber count {n}"));
                } else if n % 2 != 0 {
                    out.push(Rule::FiberParity, &face.id, format!("fiber count {n} is odd"));
                }
            }
            Some(FiberLabel::Chi(_)) if p.dim == 2 => {
                out.push(Rule::LabelKind, &face.id, "chi label on a surface portrait; use fiber=");
            }
            Some(FiberLabel::Chi(_)) => {}
        }
        if face.unbounded {
            if let Some(l) = face.label {
                if l.value() != 0 {
                    out.push(
                        Rule::OuterFiber,
                        &face.id,
                        format!("unbounded face has fiber {}", l.value()),
                    );
                }
            }
        }
    }

    let positions: HashMap<&str, _> = p
        .vertices
        .iter()
        .filter_map(|v| v.position.map(|q| (v.id.as_str(), q)))
        .collect();
    for a in &p.arcs {
        let Some(pts) = &a.points else { continue };
        if pts.len() < 2 {
            out.push(Rule::Geometry, &a.id, "polyline needs at least 2 points");
            continue;
        }
        for (end, pt) in [(&a.from, pts[0]), (&a.to, pts[pts.len() - 1])] {
            if let Some(q) = positions.get(end.as_str()) {
                if q.dist(pt) > GEOMETRY_TOL {
                    out.push(
                        Rule::Geometry,
                        &a.id,
                        format!("polyline end does not meet vertex {end}"),
                    );
                }
            }
        }
    }
    for c in &p.circles {
        if let Some(pts) = &c.points {
            if pts.len() < 3 {
                out.push(Rule::Geometry, &c.id, "closed polyline needs at least 3 points");
            }
        }
    }

    out.0
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{Arc, Vertex};
    use super::*;

    fn arc(id: &str, from: &str, to: &str, left: &str, right: &str) -> Arc {
        Arc {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            left: left.into(),
            right: right.into(),
            chi: None,
            points: None,
        }
    }

    fn cusp(id: &str) -> Vertex {
        Vertex {
            id: id.into(),
            kind: VertexKind::Cusp,
            position: None,
            index: None,
            chi: None,
        }
    }

    #[test]
    fn sphere_is_valid() {
        assert!(validate(&sphere()).is_empty());
    }

    #[test]
    fn cusp_with_three_arc_ends() {
        // Lips (two cusps, two arcs) plus a stray loop at v1.
        let mut p = Portrait::new(2);
        p.vertices.push(cusp("v1"));
        p.vertices.push(cusp("v2"));
        p.arcs.push(arc("a1", "v1", "v2", "f1", "f0"));
        p.arcs.push(arc("a2", "v2", "v1", "f1", "f0"));
        p.faces.push(face("f0", Some(0), true));
        p.faces.push(face("f1", Some(2), false));
        assert!(validate(&p).is_empty(), "{:?}", validate(&p));

        p.arcs.push(Arc {
            to: "v3".into(),
            ..arc("a3", "v1", "v1", "f0", "f0")
        });
        p.vertices.push(cusp("v3"));
        let v = validate(&p);
        assert!(
            v.iter().any(|x| x.rule == Rule::VertexDegree && x.element == "v1"),
            "{v:?}"
        );
    }

    #[test]
    fn outer_fiber_must_be_empty() {
        let mut p = sphere();
        p.faces[0].label = Some(FiberLabel::Count(2));
        let v = validate(&p);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::OuterFiber);
        assert_eq!(v[0].element, "f0");
    }

    #[test]
    fn odd_count_rejected() {
        let mut p = sphere();
        p.faces[1].label = Some(FiberLabel::Count(3));
        assert_eq!(validate(&p)[0].rule, Rule::FiberParity);
    }

    #[test]
    fn missing_face_reference() {
        let mut p = sphere();
        p.circles[0].left = "f9".into();
        let v = validate(&p);
        assert!(v
            .iter()
            .any(|x| x.rule == Rule::UnknownReference && x.message.contains("f9")));
    }

    #[test]
    fn euler_formula_catches_extra_face() {
        let mut p = sphere();
        p.faces.push(face("f2", Some(0), false));
        let rules: Vec<Rule> = validate(&p).iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::EulerFormula));
        assert!(rules.contains(&Rule::DetachedFace));
    }

    #[test]
    fn nested_circles_valid() {
        assert!(validate(&nested(Some(4))).is_empty());
    }

    #[test]
    fn index_on_crossing_rejected() {
        let mut p = Portrait::new(2);
        p.vertices.push(Vertex {
            kind: VertexKind::Crossing,
            index: Some(0),
            ..cusp("v1")
        });
        p.arcs.push(arc("a1", "v1", "v1", "f1", "f0"));
        p.arcs.push(arc("a2", "v1", "v1", "f2", "f0"));
        p.faces.push(face("f0", Some(0), true));
        p.faces.push(face("f1", Some(2), false));
        p.faces.push(face("f2", Some(2), false));
        let v = validate(&p);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].rule, Rule::CuspIndex);
    }
}
