//! Deterministic SVG drawings of portraits with geometry.
//!
//! Contour pieces are `<path class="contour">`, one per arc or circle.
//! Bounded faces are even-odd filled polygons tinted by their fiber label,
//! cusps are filled triangles and crossings small circles.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::portrait::{FiberLabel, Point, Portrait, VertexKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("element {0} has no geometry")]
    MissingGeometry(String),
    #[error("portrait has nothing to draw")]
    Empty,
}

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 24.0;
const LEGEND: f64 = 120.0;
const PALETTE: [&str; 6] = ["#dbe9f6", "#9ecae1", "#6baed6", "#3182bd", "#08519c", "#08306b"];

struct View {
    lo: Point,
    scale: f64,
    height: f64,
}

impl View {
    fn map(&self, p: Point) -> (f64, f64) {
        (
            MARGIN + (p.x - self.lo.x) * self.scale,
            self.height - MARGIN - (p.y - self.lo.y) * self.scale,
        )
    }

    fn coords(&self, pts: &[Point]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.4},{y:.4}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn label_text(l: Option<FiberLabel>) -> String {
    match l {
        Some(FiberLabel::Count(n)) => format!("n={n}"),
        Some(FiberLabel::Chi(c)) => format!("chi={c}"),
        None => "unlabeled".to_string(),
    }
}

/// Closed loops through the arcs bordering `face` on exactly one side.
fn face_loops(p: &Portrait, face: &str) -> Vec<Vec<Point>> {
    let mut loops: Vec<Vec<Point>> = Vec::new();
    let mut open: Vec<(String, String, Vec<Point>)> = p
        .arcs
        .iter()
        .filter(|a| (a.left == face) != (a.right == face))
        .filter_map(|a| a.points.clone().map(|pts| (a.from.clone(), a.to.clone(), pts)))
        .collect();
    while let Some((start, mut end, mut pts)) = open.pop() {
        while end != start {
            let Some(k) = open.iter().position(|(f, t, _)| *f == end || *t == end) else {
                break;
            };
            let (f, t, mut more) = open.remove(k);
            if f == end {
                end = t;
            } else {
                more.reverse();
                end = f;
            }
            pts.extend_from_slice(&more[1..]);
        }
        loops.push(pts);
    }
    for c in &p.circles {
        if (c.left == face) != (c.right == face) {
            if let Some(pts) = &c.points {
                loops.push(pts.clone());
            }
        }
    }
    loops
}

/// One point list whose even-odd fill covers all loops: loops are joined
/// through their first points by bridges traversed in both directions.
fn bridged(loops: &[Vec<Point>]) -> Vec<Point> {
    let mut out = Vec::new();
    let Some(anchor) = loops.first().map(|l| l[0]) else {
        return out;
    };
    for l in loops {
        out.extend_from_slice(l);
        out.push(l[0]);
        out.push(anchor);
    }
    out
}

pub fn render_svg(p: &Portrait) -> Result<String, RenderError> {
    let mut all: Vec<Point> = Vec::new();
    for a in &p.arcs {
        all.extend(
            a.points
                .as_ref()
                .ok_or_else(|| RenderError::MissingGeometry(a.id.clone()))?,
        );
    }
    for c in &p.circles {
        all.extend(
            c.points
                .as_ref()
                .ok_or_else(|| RenderError::MissingGeometry(c.id.clone()))?,
        );
    }
    for v in &p.vertices {
        all.push(v.position.ok_or_else(|| RenderError::MissingGeometry(v.id.clone()))?);
    }
    let first = *all.first().ok_or(RenderError::Empty)?;
    let (mut lo, mut hi) = (first, first);
    for q in &all {
        lo = Point::new(lo.x.min(q.x), lo.y.min(q.y));
        hi = Point::new(hi.x.max(q.x), hi.y.max(q.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let scale = (WIDTH - 2.0 * MARGIN) / span;
    let height = (hi.y - lo.y) * scale + 2.0 * MARGIN;
    let view = View { lo, scale, height };
    let total_w = WIDTH + LEGEND;

    let labels: BTreeSet<i64> = p.faces.iter().filter_map(|f| f.label.map(FiberLabel::value)).collect();
    let color = |l: Option<FiberLabel>| -> &str {
        match l {
            Some(l) => {
                let k = labels.iter().position(|&v| v == l.value()).unwrap_or(0);
                PALETTE[k.min(PALETTE.len() - 1)]
            }
            None => "#ffffff",
        }
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.4}" height="{:.4}" viewBox="0 0 {total_w:.4} {:.4}">"#,
        height.max(160.0),
        height.max(160.0)
    );
    s.push_str("<style>.contour{fill:none;stroke:#111;stroke-width:1.5}.cusp{fill:#c0392b}.crossing{fill:#fff;stroke:#111}</style>\n");
    for f in p.faces.iter().filter(|f| !f.unbounded) {
        let pts = bridged(&face_loops(p, &f.id));
        if pts.is_empty() {
            continue;
        }
        let _ = writeln!(
            s,
            r#"<polygon class="face" data-face="{}" fill="{}" fill-rule="evenodd" points="{}"/>"#,
            f.id,
            color(f.label),
            view.coords(&pts)
        );
    }
    let path = |pts: &[Point], closed: bool| -> String {
        let mut d = String::new();
        for (i, &q) in pts.iter().enumerate() {
            let (x, y) = view.map(q);
            let _ = write!(d, "{}{x:.4},{y:.4}", if i == 0 { "M" } else { " L" });
        }
        if closed {
            d.push_str(" Z");
        }
        d
    };
    for a in &p.arcs {
        let pts = a.points.as_ref().expect("checked above");
        let _ = writeln!(
            s,
            r#"<path class="contour" data-id="{}" d="{}"/>"#,
            a.id,
            path(pts, false)
        );
    }
    for c in &p.circles {
        let pts = c.points.as_ref().expect("checked above");
        let _ = writeln!(
            s,
            r#"<path class="contour" data-id="{}" d="{}"/>"#,
            c.id,
            path(pts, true)
        );
    }
    for v in &p.vertices {
        let (x, y) = view.map(v.position.expect("checked above"));
        match v.kind {
            VertexKind::Cusp => {
                let _ = writeln!(
                    s,
                    r#"<polygon class="cusp" data-id="{}" points="{:.4},{:.4} {:.4},{:.4} {:.4},{:.4}"/>"#,
                    v.id,
                    x,
                    y - 5.0,
                    x - 4.5,
                    y + 3.5,
                    x + 4.5,
                    y + 3.5
                );
            }
            VertexKind::Crossing => {
                let _ = writeln!(
                    s,
                    r#"<circle class="crossing" data-id="{}" cx="{x:.4}" cy="{y:.4}" r="3.0000"/>"#,
                    v.id
                );
            }
        }
    }
    s.push_str("<g class=\"legend\">\n");
    let mut row = 0;
    let mut seen = BTreeSet::new();
    for f in &p.faces {
        let text = label_text(f.label);
        if !seen.insert(text.clone()) {
            continue;
        }
        let y = MARGIN + 20.0 * row as f64;
        let _ = writeln!(
            s,
            r##"<rect x="{:.4}" y="{y:.4}" width="14.0000" height="14.0000" fill="{}" stroke="#111"/><text x="{:.4}" y="{:.4}" font-size="12">{text}</text>"##,
            WIDTH + 8.0,
            color(f.label),
            WIDTH + 28.0,
            y + 11.0
        );
        row += 1;
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}
