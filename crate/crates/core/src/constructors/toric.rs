//! Portraits of toric surfaces read off a Delzant polygon: the orbit map
//! folds along the edges and has a cusp over every vertex.

use super::{face, ConstructError};
use crate::portrait::{Arc, FiberLabel, Point, Portrait, Vertex, VertexKind};

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn primitive(v: (i64, i64)) -> (i64, i64) {
    let g = gcd(v.0, v.1).max(1);
    (v.0 / g, v.1 / g)
}

fn cross(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

/// Check convexity and the Delzant condition. Returns the vertices in
/// counter-clockwise order.
fn check_polygon(poly: &[(i64, i64)]) -> Result<Vec<(i64, i64)>, ConstructError> {
    let n = poly.len();
    if n < 3 {
        return Err(ConstructError::TooFewVertices(n));
    }
    let area2: i64 = (0..n).map(|i| cross(poly[i], poly[(i + 1) % n])).sum();
    let mut v = poly.to_vec();
    if area2 < 0 {
        v.reverse();
    }
    for i in 0..n {
        let (prev, cur, next) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
        let e0 = (cur.0 - prev.0, cur.1 - prev.1);
        let e1 = (next.0 - cur.0, next.1 - cur.1);
        if cross(e0, e1) <= 0 {
            return Err(ConstructError::NonConvex(cur));
        }
    }
    // Report the first offending vertex in the caller's order.
    for &cur in poly {
        let i = v.iter().position(|&w| w == cur).expect("same vertex set");
        let (prev, next) = (v[(i + n - 1) % n], v[(i + 1) % n]);
        let u = primitive((next.0 - cur.0, next.1 - cur.1));
        let w = primitive((prev.0 - cur.0, prev.1 - cur.1));
        let det = cross(u, w);
        if det.abs() != 1 {
            return Err(ConstructError::Delzant { vertex: cur, det });
        }
    }
    Ok(v)
}

/// Dimension-4 portrait: a cusp of index 1 over each vertex (point fiber),
/// fold arcs along the edges (circle fibers), torus fibers inside.
pub fn toric_portrait(polygon: &[(i64, i64)]) -> Result<Portrait, ConstructError> {
    let v = check_polygon(polygon)?;
    let n = v.len();
    let mut p = Portrait::new(4);
    p.faces.push(face("f0", FiberLabel::Chi(0), true));
    p.faces.push(face("f1", FiberLabel::Chi(0), false));
    let pt = |q: (i64, i64)| Point::new(q.0 as f64, q.1 as f64);
    for (i, &q) in v.iter().enumerate() {
        p.vertices.push(Vertex {
            id: format!("v{}", i + 1),
            kind: VertexKind::Cusp,
            position: Some(pt(q)),
            index: Some(1),
            chi: Some(1),
        });
    }
    for i in 0..n {
        let (a, b) = (pt(v[i]), pt(v[(i + 1) % n]));
        let points = (0..=8).map(|k| a.add(b.sub(a).scale(k as f64 / 8.0))).collect();
        p.arcs.push(Arc {
            id: format!("a{}", i + 1),
            from: format!("v{}", i + 1),
            to: format!("v{}", (i + 1) % n + 1),
            left: "f1".into(),
            right: "f0".into(),
            chi: Some(0),
            points: Some(points),
        });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{stratified_chi, thom_parity, ThomVerdict};
    use crate::portrait::validate;

    #[test]
    fn triangle_and_square() {
        for (poly, k) in [
            (vec![(0, 0), (1, 0), (0, 1)], 3),
            (vec![(0, 0), (1, 0), (1, 1), (0, 1)], 4),
            (vec![(0, 0), (0, 1), (1, 1), (1, 0)], 4),
            (vec![(0, 0), (2, 0), (1, 1), (0, 1)], 4),
            (vec![(0, 0), (1, 0), (2, 1), (2, 2), (1, 2), (0, 1)], 6),
        ] {
            let p = toric_portrait(&poly).unwrap();
            assert!(validate(&p).is_empty());
            assert_eq!(p.cusp_count(), k);
            let chi = stratified_chi(&p, None).unwrap();
            assert_eq!(chi, k as i64);
            assert_eq!(thom_parity(&p, chi), ThomVerdict::Pass);
        }
    }

    #[test]
    fn rejections() {
        assert_eq!(
            toric_portrait(&[(0, 0), (2, 0), (0, 1)]).unwrap_err(),
            ConstructError::Delzant { vertex: (0, 1), det: 2 }
        );
        assert!(matches!(
            toric_portrait(&[(0, 0), (2, 0), (1, 1), (2, 2), (0, 2)]),
            Err(ConstructError::NonConvex((1, 1)))
        ));
        assert!(matches!(
            toric_portrait(&[(0, 0), (1, 0)]),
            Err(ConstructError::TooFewVertices(2))
        ));
        // Scaled standard triangle is still Delzant.
        assert!(toric_portrait(&[(0, 0), (2, 0), (0, 2)]).is_ok());
    }
}
