//! Small dense vector helpers for 3-space.

pub type V3 = [f64; 3];

pub fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &V3, b: &V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &V3) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: &V3, b: &V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: &V3, b: &V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: &V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dist(a: &V3, b: &V3) -> f64 {
    norm(&sub(a, b))
}

pub fn lerp(a: &V3, b: &V3, t: f64) -> V3 {
    add(a, &scale(&sub(b, a), t))
}

pub fn det3(m: &[V3; 3]) -> f64 {
    dot(&m[0], &cross(&m[1], &m[2]))
}

/// Solve `m x = r` by Cramer's rule; `None` when the matrix is numerically
/// singular relative to its row norms.
pub fn solve3(m: &[V3; 3], r: &V3) -> Option<V3> {
    let d = det3(m);
    let size = norm(&m[0]) * norm(&m[1]) * norm(&m[2]);
    if size == 0.0 || d.abs() < 1e-14 * size {
        return None;
    }
    let col = |k: usize| {
        let mut mk = *m;
        for (row, rv) in mk.iter_mut().zip(r) {
            row[k] = *rv;
        }
        det3(&mk) / d
    };
    Some([col(0), col(1), col(2)])
}

/// Minimum-norm solution of the underdetermined system `a . x = ra`,
/// `b . x = rb`.
pub fn min_norm2(a: &V3, b: &V3, ra: f64, rb: f64) -> Option<V3> {
    let (aa, ab, bb) = (dot(a, a), dot(a, b), dot(b, b));
    let d = aa * bb - ab * ab;
    if d <= 1e-14 * aa * bb || d == 0.0 {
        return None;
    }
    let la = (bb * ra - ab * rb) / d;
    let lb = (aa * rb - ab * ra) / d;
    Some(add(&scale(a, la), &scale(b, lb)))
}
