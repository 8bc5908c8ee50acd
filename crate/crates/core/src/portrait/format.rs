//! Line-oriented portrait files.
//!
//! ```text
//! portrait v1 dim=2
//! vertex v1 cusp at 0.5 0 index=0
//! arc a1 from=v1 to=v2 left=f1 right=f0 pts= 0,0 1,0
//! circle c1 left=f1 right=f0 pts= 1,0 0,1 -1,0 0,-1
//! face f0 fiber=0 unbounded
//! ```
//!
//! `#` starts a comment. Vertices, arcs and circles may also carry
//! `chi=<int>` (fiber Euler characteristic over that stratum), which
//! portraits of dimension 3 and up need for the stratified sum.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::{canonical_cusp_index, Arc, Circle, Face, FiberLabel, Point, Portrait, Vertex, VertexKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: reference to undeclared id '{id}'")]
    Undeclared { line: usize, id: String },
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

struct Fields<'a> {
    line: usize,
    tokens: Vec<&'a str>,
    used: Vec<bool>,
}

impl<'a> Fields<'a> {
    fn new(line: usize, tokens: Vec<&'a str>) -> Self {
        let used = vec![false; tokens.len()];
        Fields { line, tokens, used }
    }

    fn key(&mut self, key: &str) -> Option<&'a str> {
        for (i, t) in self.tokens.iter().enumerate() {
            if self.used[i] {
                continue;
            }
            if let Some(rest) = t.strip_prefix(key).and_then(|r| r.strip_prefix('=')) {
                self.used[i] = true;
                return Some(rest);
            }
        }
        None
    }

    fn required(&mut self, key: &str) -> Result<&'a str, FormatError> {
        match self.key(key) {
            Some(v) if !v.is_empty() => Ok(v),
            _ => Err(syntax(self.line, format!("missing '{key}='"))),
        }
    }

    fn int(&mut self, key: &str) -> Result<Option<i64>, FormatError> {
        self.key(key)
            .map(|v| {
                v.parse::<i64>()
                    .map_err(|_| syntax(self.line, format!("'{key}' expects an integer, got '{v}'")))
            })
            .transpose()
    }

    fn flag(&mut self, name: &str) -> bool {
        for (i, t) in self.tokens.iter().enumerate() {
            if !self.used[i] && *t == name {
                self.used[i] = true;
                return true;
            }
        }
        false
    }

    /// `pts=` consumes every following token as an `x,y` pair.
    fn points(&mut self) -> Result<Option<Vec<Point>>, FormatError> {
        let Some(start) = self
            .tokens
            .iter()
            .enumerate()
            .position(|(i, t)| !self.used[i] && t.starts_with("pts="))
        else {
            return Ok(None);
        };
        let mut pts = Vec::new();
        for i in start..self.tokens.len() {
            self.used[i] = true;
            let tok = if i == start {
                &self.tokens[i][4..]
            } else {
                self.tokens[i]
            };
            if tok.is_empty() {
                continue;
            }
            pts.push(parse_point(self.line, tok)?);
        }
        Ok(Some(pts))
    }

    fn finish(&self) -> Result<(), FormatError> {
        match self.tokens.iter().zip(&self.used).find(|(_, u)| !**u) {
            Some((t, _)) => Err(syntax(self.line, format!("unexpected token '{t}'"))),
            None => Ok(()),
        }
    }
}

fn parse_point(line: usize, tok: &str) -> Result<Point, FormatError> {
    let (x, y) = tok
        .split_once(',')
        .ok_or_else(|| syntax(line, format!("point '{tok}' is not of the form x,y")))?;
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| syntax(line, format!("bad coordinate '{s}'")))
    };
    Ok(Point::new(parse(x)?, parse(y)?))
}

fn parse_f64(line: usize, s: Option<&&str>) -> Result<f64, FormatError> {
    let s = s.ok_or_else(|| syntax(line, "'at' needs two coordinates"))?;
    s.parse::<f64>()
        .map_err(|_| syntax(line, format!("bad coordinate '{s}'")))
}

pub fn parse_portrait(text: &str) -> Result<Portrait, FormatError> {
    let mut portrait: Option<Portrait> = None;
    // (line, referenced id, is vertex)
    let mut refs: Vec<(usize, String, bool)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(p) = portrait.as_mut() else {
            if tokens.len() != 3 || tokens[0] != "portrait" || tokens[1] != "v1" {
                return Err(syntax(line, "expected header 'portrait v1 dim=<n>'"));
            }
            let dim = tokens[2]
                .strip_prefix("dim=")
                .and_then(|d| d.parse::<u32>().ok())
                .ok_or_else(|| syntax(line, "header needs dim=<positive integer>"))?;
            portrait = Some(Portrait::new(dim));
            continue;
        };
        if tokens.len() < 2 {
            return Err(syntax(line, format!("'{}' needs an id", tokens[0])));
        }
        let id = tokens[1].to_string();
        if id.contains('=') {
            return Err(syntax(line, format!("bad id '{id}'")));
        }
        match tokens[0] {
            "vertex" => {
                let kind = match tokens.get(2) {
                    Some(&"cusp") => VertexKind::Cusp,
                    Some(&"crossing") => VertexKind::Crossing,
                    _ => return Err(syntax(line, "vertex kind must be 'cusp' or 'crossing'")),
                };
                let mut rest = &tokens[3..];
                let mut position = None;
                if rest.first() == Some(&"at") {
                    let x = parse_f64(line, rest.get(1))?;
                    let y = parse_f64(line, rest.get(2))?;
                    position = Some(Point::new(x, y));
                    rest = &rest[3..];
                }
                let mut f = Fields::new(line, rest.to_vec());
                let index = match f.int("index")? {
                    Some(k) if k < 0 => return Err(syntax(line, "cusp index must be nonnegative")),
                    Some(k) => Some(canonical_cusp_index(p.dim, k as u32)),
                    None => None,
                };
                let chi = f.int("chi")?;
                f.finish()?;
                p.vertices.push(Vertex {
                    id,
                    kind,
                    position,
                    index,
                    chi,
                });
            }
            "arc" => {
                let mut f = Fields::new(line, tokens[2..].to_vec());
                let from = f.required("from")?.to_string();
                let to = f.required("to")?.to_string();
                let left = f.required("left")?.to_string();
                let right = f.required("right")?.to_string();
                let chi = f.int("chi")?;
                let points = f.points()?;
                f.finish()?;
                refs.push((line, from.clone(), true));
                refs.push((line, to.clone(), true));
                refs.push((line, left.clone(), false));
                refs.push((line, right.clone(), false));
                p.arcs.push(Arc {
                    id,
                    from,
                    to,
                    left,
                    right,
                    chi,
                    points,
                });
            }
            "circle" => {
                let mut f = Fields::new(line, tokens[2..].to_vec());
                let left = f.required("left")?.to_string();
                let right = f.required("right")?.to_string();
                let chi = f.int("chi")?;
                let points = f.points()?;
                f.finish()?;
                refs.push((line, left.clone(), false));
                refs.push((line, right.clone(), false));
                p.circles.push(Circle {
                    id,
                    left,
                    right,
                    chi,
                    points,
                });
            }
            "face" => {
                let mut f = Fields::new(line, tokens[2..].to_vec());
                let fiber = f.int("fiber")?;
                let chi = f.int("chi")?;
                let label = match (fiber, chi) {
                    (Some(_), Some(_)) => return Err(syntax(line, "face takes fiber= or chi=, not both")),
                    (Some(n), None) => Some(FiberLabel::Count(n)),
                    (None, Some(c)) => Some(FiberLabel::Chi(c)),
                    (None, None) => None,
                };
                let unbounded = f.flag("unbounded");
                f.finish()?;
                p.faces.push(Face { id, label, unbounded });
            }
            other => return Err(syntax(line, format!("unknown record '{other}'"))),
        }
    }

    let p = portrait.ok_or_else(|| syntax(1, "empty file; expected header 'portrait v1 dim=<n>'"))?;
    let vertices: HashSet<&str> = p.vertices.iter().map(|v| v.id.as_str()).collect();
    let faces: HashSet<&str> = p.faces.iter().map(|f| f.id.as_str()).collect();
    for (line, id, is_vertex) in refs {
        let known = if is_vertex {
            vertices.contains(id.as_str())
        } else {
            faces.contains(id.as_str())
        };
        if !known {
            return Err(FormatError::Undeclared { line, id });
        }
    }
    Ok(p)
}

fn write_points(out: &mut String, pts: &Option<Vec<Point>>) {
    if let Some(pts) = pts {
        out.push_str(" pts=");
        for q in pts {
            let _ = write!(out, " {},{}", q.x, q.y);
        }
    }
}

/// Canonical text: records grouped by kind, each group sorted by id.
pub fn serialize_portrait(p: &Portrait) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "portrait v1 dim={}", p.dim);

    let mut vertices: Vec<&Vertex> = p.vertices.iter().collect();
    vertices.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    for v in vertices {
        let kind = match v.kind {
            VertexKind::Cusp => "cusp",
            VertexKind::Crossing => "crossing",
        };
        let _ = write!(out, "vertex {} {kind}", v.id);
        if let Some(q) = v.position {
            let _ = write!(out, " at {} {}", q.x, q.y);
        }
        if let Some(k) = v.index {
            let _ = write!(out, " index={k}");
        }
        if let Some(c) = v.chi {
            let _ = write!(out, " chi={c}");
        }
        out.push('\n');
    }

    let mut arcs: Vec<&Arc> = p.arcs.iter().collect();
    arcs.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    for a in arcs {
        let _ = write!(
            out,
            "arc {} from={} to={} left={} right={}",
            a.id, a.from, a.to, a.left, a.right
        );
        if let Some(c) = a.chi {
            let _ = write!(out, " chi={c}");
        }
        write_points(&mut out, &a.points);
        out.push('\n');
    }

    let mut circles: Vec<&Circle> = p.circles.iter().collect();
    circles.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    for c in circles {
        let _ = write!(out, "circle {} left={} right={}", c.id, c.left, c.right);
        if let Some(x) = c.chi {
            let _ = write!(out, " chi={x}");
        }
        write_points(&mut out, &c.points);
        out.push('\n');
    }

    let mut faces: Vec<&Face> = p.faces.iter().collect();
    faces.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    for f in faces {
        let _ = write!(out, "face {}", f.id);
        match f.label {
            Some(FiberLabel::Count(n)) => {
                let _ = write!(out, " fiber={n}");
            }
            Some(FiberLabel::Chi(c)) => {
                let _ = write!(out, " chi={c}");
            }
            None => {}
        }
        if f.unbounded {
            out.push_str(" unbounded");
        }
        out.push('\n');
    }
    out
}

/// Orders `f2` before `f10`.
pub(crate) fn natural_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let cut = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        (&s[..cut], s[cut..].parse().ok())
    }
    let (pa, na) = split(a);
    let (pb, nb) = split(b);
    pa.cmp(pb).then(na.cmp(&nb)).then(a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = "\
# sphere: one fold circle
portrait v1 dim=2
circle c1 left=f1 right=f0 pts= 1,0 0,1 -1,0 0,-1
face f0 fiber=0 unbounded
face f1 fiber=2
";

    #[test]
    fn sphere_fixture() {
        let p = parse_portrait(SPHERE).unwrap();
        assert_eq!(p.vertices.len(), 0);
        assert_eq!(p.circles.len(), 1);
        assert_eq!(p.faces.len(), 2);
        assert_eq!(p.circles[0].points.as_ref().unwrap().len(), 4);
    }

    #[test]
    fn missing_vertex_is_named() {
        let text =
            "portrait v1 dim=2\nvertex v1 cusp\narc a1 from=v1 to=v9 left=f1 right=f0\nface f0 unbounded\nface f1\n";
        assert_eq!(
            parse_portrait(text),
            Err(FormatError::Undeclared {
                line: 3,
                id: "v9".to_string()
            })
        );
    }

    #[test]
    fn syntax_error_has_line() {
        let text = "portrait v1 dim=2\nface f0 fiber=zero unbounded\n";
        match parse_portrait(text) {
            Err(FormatError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_portrait("portrait v2 dim=2\n"),
            Err(FormatError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_portrait("portrait v1 dim=2\nface f0 bogus\n"),
            Err(FormatError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn canonical_text_is_a_fixed_point() {
        let p = parse_portrait(SPHERE).unwrap();
        let text = serialize_portrait(&p);
        assert_eq!(serialize_portrait(&parse_portrait(&text).unwrap()), text);
        assert!(text.starts_with("portrait v1 dim=2\ncircle c1 left=f1 right=f0 pts= 1,0 0,1 -1,0 0,-1\n"));
    }

    #[test]
    fn cusp_index_canonicalized_on_read() {
        let p = parse_portrait("portrait v1 dim=4\nvertex v1 cusp index=2\nface f0 unbounded\n").unwrap();
        assert_eq!(p.vertices[0].index, Some(0));
    }

    #[test]
    fn natural_ordering() {
        let mut ids = vec!["f10", "f2", "f1", "g0"];
        ids.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(ids, vec!["f1", "f2", "f10", "g0"]);
    }
}
