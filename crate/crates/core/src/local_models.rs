//! Local normal forms of stable maps to the plane, and the twice-folding
//! projection `(|x|^2, |y|^2)` on `D^p x D^q` together with the stable
//! perturbation used here,
//!
//! ```text
//! TF_eps(x, y) = (|x|^2 + eps * y_1, |y|^2 + eps * x_1).
//! ```
//!
//! For `eps > 0` the singular set is the hyperbola `4 x_1 y_1 = eps^2` in the
//! plane `x_2 = .. = y_2 = .. = 0`; its positive branch carries exactly one
//! cusp, at `x_1 = y_1 = eps/2`.

use thiserror::Error;

use crate::numeric::{parse_map_spec, MapSpec};
use crate::portrait::{FiberLabel, Portrait, VertexKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LocalModelError {
    #[error("invalid twice-fold parameters: {0}")]
    InvalidParameters(String),
    #[error("point outside the model domain (radius {radius})")]
    OutOfDomain { radius: f64 },
    #[error("cusp index {index} outside [0, {max}] for dimension {dim}")]
    IndexOutOfRange { dim: u32, index: u32, max: u32 },
    #[error("singular set resolution too coarse: {coarse} branches at {n} cells, {fine} at {n2} cells")]
    ResolutionTooCoarse {
        n: usize,
        n2: usize,
        coarse: usize,
        fine: usize,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// The twice-folding projection on `D^p x D^q` with perturbation `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwiceFold {
    pub p: usize,
    pub q: usize,
    pub eps: f64,
    pub radius: f64,
}

impl TwiceFold {
    pub fn new(p: usize, q: usize, eps: f64) -> Result<Self, LocalModelError> {
        Self::with_radius(p, q, eps, 1.0)
    }

    pub fn with_radius(p: usize, q: usize, eps: f64, radius: f64) -> Result<Self, LocalModelError> {
        if p == 0 || q == 0 {
            return Err(LocalModelError::InvalidParameters(format!(
                "p={p}, q={q}; both must be >= 1"
            )));
        }
        if eps.is_nan() || eps < 0.0 || radius.is_nan() || radius <= 0.0 || eps >= radius {
            return Err(LocalModelError::InvalidParameters(format!(
                "need 0 <= eps < radius, got eps={eps}, radius={radius}"
            )));
        }
        Ok(TwiceFold { p, q, eps, radius })
    }

    fn check(&self, x: &[f64], y: &[f64]) -> Result<(), LocalModelError> {
        if x.len() != self.p || y.len() != self.q {
            return Err(LocalModelError::InvalidParameters(format!(
                "expected point in R^{} x R^{}, got R^{} x R^{}",
                self.p,
                self.q,
                x.len(),
                y.len()
            )));
        }
        let tol = self.radius * (1.0 + 1e-12);
        if norm(x) > tol || norm(y) > tol {
            return Err(LocalModelError::OutOfDomain { radius: self.radius });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<[f64; 2], LocalModelError> {
        self.check(x, y)?;
        Ok([dot(x, x) + self.eps * y[0], dot(y, y) + self.eps * x[0]])
    }

    /// 2 x (p+q) Jacobian, rows are the two components.
    pub fn jacobian(&self, x: &[f64], y: &[f64]) -> [Vec<f64>; 2] {
        let mut r1: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let mut r2 = vec![0.0; self.p];
        r2[0] = self.eps;
        let mut tail1 = vec![0.0; self.q];
        tail1[0] = self.eps;
        r1.extend(tail1);
        r2.extend(y.iter().map(|v| 2.0 * v));
        [r1, r2]
    }

    /// Ratio of the smaller to the larger singular value of the Jacobian.
    pub fn rank_deficiency(&self, x: &[f64], y: &[f64]) -> f64 {
        let [r1, r2] = self.jacobian(x, y);
        let (a, b, c) = (dot(&r1, &r1), dot(&r1, &r2), dot(&r2, &r2));
        let tr = a + c;
        let det = (a * c - b * b).max(0.0);
        let disc = ((tr * tr / 4.0) - det).max(0.0).sqrt();
        let big = tr / 2.0 + disc;
        if big == 0.0 {
            return 0.0;
        }
        let small = (det / big).max(0.0);
        (small / big).sqrt()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn tf_eval(m: &TwiceFold, x: &[f64], y: &[f64]) -> Result<[f64; 2], LocalModelError> {
    m.eval(x, y)
}

/// Rank-drop locus of a twice-fold model.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSet {
    /// Polylines in `R^{p+q}` (coordinates `x` then `y`).
    pub branches: Vec<Vec<Vec<f64>>>,
    /// Whether the locus crosses itself (the unperturbed model does, at 0).
    pub self_crossing: bool,
}

/// Singular set of the model. Exact for `p = q = 1`, where `resolution` is
/// the number of samples per branch and the branch count is cross-checked
/// against a sign scan of the Jacobian determinant at two grid sizes. For
/// larger `(p, q)` (up to `(2, 2)`) the locus is sampled on a grid of
/// `resolution` nodes per axis and kept where the Jacobian is rank deficient.
pub fn tf_singular_set(m: &TwiceFold, resolution: usize) -> Result<SingularSet, LocalModelError> {
    if m.p > 2 || m.q > 2 {
        return Err(LocalModelError::Unsupported(format!(
            "(p, q) = ({}, {}) above (2, 2)",
            m.p, m.q
        )));
    }
    let resolution = resolution.max(8);
    if m.p == 1 && m.q == 1 {
        return planar_singular_set(m, resolution);
    }
    if m.eps == 0.0 {
        // Rows (2x, 0) and (0, 2y): rank drops on {x = 0} u {y = 0}, which
        // is not a curve. Report the two coordinate axes of the (x1, y1)
        // plane as witnesses.
        let n = m.p + m.q;
        let axis = |k: usize| -> Vec<Vec<f64>> {
            (0..=resolution)
                .map(|i| {
                    let mut v = vec![0.0; n];
                    v[k] = m.radius * (2.0 * i as f64 / resolution as f64 - 1.0);
                    v
                })
                .collect()
        };
        return Ok(SingularSet {
            branches: vec![axis(0), axis(m.p)],
            self_crossing: true,
        });
    }
    Ok(SingularSet {
        branches: sampled_rank_drop(m, resolution | 1),
        self_crossing: false,
    })
}

fn planar_singular_set(m: &TwiceFold, resolution: usize) -> Result<SingularSet, LocalModelError> {
    let r = m.radius;
    let (coarse, fine) = (
        det_sign_components(m, 4 * resolution),
        det_sign_components(m, 8 * resolution),
    );
    if coarse != fine {
        return Err(LocalModelError::ResolutionTooCoarse {
            n: 4 * resolution,
            n2: 8 * resolution,
            coarse,
            fine,
        });
    }
    if m.eps == 0.0 {
        let line = |horizontal: bool| -> Vec<Vec<f64>> {
            (0..=resolution)
                .map(|i| {
                    let t = r * (2.0 * i as f64 / resolution as f64 - 1.0);
                    if horizontal {
                        vec![t, 0.0]
                    } else {
                        vec![0.0, t]
                    }
                })
                .collect()
        };
        return Ok(SingularSet {
            branches: vec![line(true), line(false)],
            self_crossing: true,
        });
    }
    // Branch y = k / x with k = eps^2 / 4, for x in [k / r, r]; sampled
    // geometrically so both ends are resolved.
    let k = m.eps * m.eps / 4.0;
    let (x0, x1) = (k / r, r);
    let positive: Vec<Vec<f64>> = (0..=resolution)
        .map(|i| {
            let x = x0 * (x1 / x0).powf(i as f64 / resolution as f64);
            vec![x, k / x]
        })
        .collect();
    let negative = positive.iter().map(|v| vec![-v[0], -v[1]]).collect();
    Ok(SingularSet {
        branches: vec![positive, negative],
        self_crossing: false,
    })
}

/// Connected components (8-neighbour) of grid cells where
/// `4 x y - eps^2` changes sign, on an `n x n` grid over the square domain.
fn det_sign_components(m: &TwiceFold, n: usize) -> usize {
    let r = m.radius;
    let h = 2.0 * r / n as f64;
    let det = |i: usize, j: usize| {
        let (x, y) = (-r + i as f64 * h, -r + j as f64 * h);
        4.0 * x * y - m.eps * m.eps >= 0.0
    };
    let mut marked = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let s = [det(i, j), det(i + 1, j), det(i, j + 1), det(i + 1, j + 1)];
            marked[i * n + j] = s.iter().any(|&v| v != s[0]);
        }
    }
    let mut seen = vec![false; n * n];
    let mut count = 0;
    for start in 0..n * n {
        if !marked[start] || seen[start] {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(c) = stack.pop() {
            let (i, j) = ((c / n) as i64, (c % n) as i64);
            for di in -1..=1 {
                for dj in -1..=1 {
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                        continue;
                    }
                    let d = a as usize * n + b as usize;
                    if marked[d] && !seen[d] {
                        seen[d] = true;
                        stack.push(d);
                    }
                }
            }
        }
    }
    count
}

/// Grid points refined onto `4 x1 y1 = eps^2` along the x1 axis, kept where
/// the full Jacobian is rank deficient. Grouped by the sign of `x1`.
fn sampled_rank_drop(m: &TwiceFold, n: usize) -> Vec<Vec<Vec<f64>>> {
    let dim = m.p + m.q;
    let r = m.radius;
    let h = 2.0 * r / (n - 1) as f64;
    let minor = |v: &[f64]| 4.0 * v[0] * v[m.p] - m.eps * m.eps;
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let others: Vec<usize> = (1..dim).collect();
    let total = n.pow(others.len() as u32);
    for code in 0..total {
        let mut v = vec![0.0; dim];
        let mut c = code;
        for &k in &others {
            v[k] = -r + (c % n) as f64 * h;
            c /= n;
        }
        for i in 0..n - 1 {
            let mut a = v.clone();
            a[0] = -r + i as f64 * h;
            let mut b = v.clone();
            b[0] = a[0] + h;
            let (fa, fb) = (minor(&a), minor(&b));
            if fa == 0.0 || fa.signum() == fb.signum() {
                continue;
            }
            let (mut lo, mut hi) = (a[0], b[0]);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let mut t = v.clone();
                t[0] = mid;
                if minor(&t).signum() == fa.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            let mut pt = v.clone();
            pt[0] = 0.5 * (lo + hi);
            if norm(&pt[..m.p]) > r || norm(&pt[m.p..]) > r {
                continue;
            }
            if m.rank_deficiency(&pt[..m.p], &pt[m.p..]) < 1e-6 {
                if pt[0] > 0.0 {
                    pos.push(pt);
                } else {
                    neg.push(pt);
                }
            }
        }
    }
    pos.sort_by(|a, b| a[0].total_cmp(&b[0]));
    neg.sort_by(|a, b| a[0].total_cmp(&b[0]));
    vec![pos, neg].into_iter().filter(|b| !b.is_empty()).collect()
}

/// Cusps of the `p = q = 1` model: points on the singular hyperbola where the
/// image curve's velocity vanishes, located by a sign change of
/// `d/dx (x^2 + eps * k/x) = 2x - eps k / x^2` and bisection.
pub fn tf_cusps(m: &TwiceFold) -> Result<Vec<[f64; 2]>, LocalModelError> {
    if m.p != 1 || m.q != 1 {
        return Err(LocalModelError::Unsupported(
            "closed-form contour only for p = q = 1".to_string(),
        ));
    }
    if m.eps == 0.0 {
        return Ok(Vec::new());
    }
    let k = m.eps * m.eps / 4.0;
    let speed = |x: f64| 2.0 * x - m.eps * k / (x * x);
    let mut out = Vec::new();
    for sign in [1.0, -1.0] {
        let n = 4096;
        let (x0, x1) = (k / m.radius, m.radius);
        let at = |i: usize| sign * x0 * (x1 / x0).powf(i as f64 / n as f64);
        for i in 0..n {
            let (a, b) = (at(i), at(i + 1));
            if speed(a).signum() == speed(b).signum() {
                continue;
            }
            let (mut lo, mut hi) = (a, b);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if speed(mid).signum() == speed(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let x = 0.5 * (lo + hi);
            out.push([x, k / x]);
        }
    }
    Ok(out)
}

/// The `p = q = 1` model as a bounded map spec on the plane `z = 0`.
pub fn tf_map_spec(m: &TwiceFold) -> Result<MapSpec, LocalModelError> {
    if m.p != 1 || m.q != 1 {
        return Err(LocalModelError::Unsupported("map spec only for p = q = 1".to_string()));
    }
    let (r, e) = (m.radius, m.eps);
    let text = format!(
        "map v1\nsurface: z\nF1: x^2 + {e}*y\nF2: y^2 + {e}*x\nbox: {} {r} {} {r} -0.5 0.5\ndomain: bounded\n",
        -r, -r
    );
    parse_map_spec(&text).map_err(|e| LocalModelError::InvalidParameters(e.to_string()))
}

/// Fold normal form `(t, x^2)`.
pub fn fold_normal(t: f64, x: f64) -> (f64, f64) {
    (t, x * x)
}

/// Cusp normal form `(t, x^3 - t x)`.
pub fn cusp_normal(t: f64, x: f64) -> (f64, f64) {
    (t, x * x * x - t * x)
}

/// Critical points and values of a map of the plane, found where the
/// Jacobian determinant changes sign along grid edges and refined by
/// bisection. Returns `(point, value)` pairs.
pub fn planar_critical_values<F, D>(
    map: F,
    jac_det: D,
    lo: [f64; 2],
    hi: [f64; 2],
    n: usize,
) -> Vec<([f64; 2], [f64; 2])>
where
    F: Fn(f64, f64) -> (f64, f64),
    D: Fn(f64, f64) -> f64,
{
    let hx = (hi[0] - lo[0]) / n as f64;
    let hy = (hi[1] - lo[1]) / n as f64;
    let mut out = Vec::new();
    let mut refine = |a: [f64; 2], b: [f64; 2]| {
        let (fa, fb) = (jac_det(a[0], a[1]), jac_det(b[0], b[1]));
        if fa == 0.0 {
            let v = map(a[0], a[1]);
            out.push((a, [v.0, v.1]));
            return;
        }
        if fa.signum() == fb.signum() {
            return;
        }
        let (mut p, mut q) = (a, b);
        for _ in 0..100 {
            let mid = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            if jac_det(mid[0], mid[1]).signum() == fa.signum() {
                p = mid;
            } else {
                q = mid;
            }
        }
        let c = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
        let v = map(c[0], c[1]);
        out.push((c, [v.0, v.1]));
    };
    for i in 0..=n {
        for j in 0..=n {
            let a = [lo[0] + i as f64 * hx, lo[1] + j as f64 * hy];
            if i < n {
                refine(a, [a[0] + hx, a[1]]);
            }
            if j < n {
                refine(a, [a[0], a[1] + hy]);
            }
        }
    }
    out
}

/// Twice-fold factor dimensions `(p, q)` with `p <= q` attached to a cusp of
/// index `k` in dimension `n`: `(k + 1, n - k - 1)` up to order.
pub fn fan_fiber_model(n: u32, k: u32) -> Result<(u32, u32), LocalModelError> {
    if n < 2 || k > n - 2 {
        return Err(LocalModelError::IndexOutOfRange {
            dim: n,
            index: k,
            max: n.saturating_sub(2),
        });
    }
    let (p, q) = (k + 1, n - k - 1);
    Ok((p.min(q), p.max(q)))
}

/// Local configuration around one cusp of a portrait.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspedFan {
    pub vertex: String,
    /// The two arcs leaving the cusp (equal ids for a loop).
    pub arcs: [String; 2],
    /// Local faces with their fiber label values, richest first.
    pub faces: Vec<(String, Option<i64>)>,
    pub model: Option<(u32, u32)>,
}

impl CuspedFan {
    /// For surfaces: the two local faces differ by exactly 2.
    pub fn is_consistent(&self) -> bool {
        match self.faces.as_slice() {
            [(_, Some(a)), (_, Some(b))] => (a - b).abs() == 2,
            _ => false,
        }
    }
}

/// One fan per cusp vertex, in vertex order.
pub fn detect_cusped_fans(p: &Portrait) -> Vec<CuspedFan> {
    let mut fans = Vec::new();
    for v in p.vertices.iter().filter(|v| v.kind == VertexKind::Cusp) {
        let mut arcs: Vec<String> = Vec::new();
        for a in &p.arcs {
            if a.from == v.id {
                arcs.push(a.id.clone());
            }
            if a.to == v.id {
                arcs.push(a.id.clone());
            }
        }
        if arcs.len() != 2 {
            continue;
        }
        let mut faces: Vec<(String, Option<i64>)> = p
            .local_faces(&v.id)
            .into_iter()
            .map(|f| (f.to_string(), p.face(f).and_then(|f| f.label).map(FiberLabel::value)))
            .collect();
        faces.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let index = v.index.or(if p.dim == 2 { Some(0) } else { None });
        let model = index.and_then(|k| fan_fiber_model(p.dim, k).ok());
        fans.push(CuspedFan {
            vertex: v.id.clone(),
            arcs: [arcs[0].clone(), arcs[1].clone()],
            faces,
            model,
        });
    }
    fans
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_values() {
        let m = TwiceFold::new(1, 1, 0.0).unwrap();
        assert_eq!(tf_eval(&m, &[0.5], &[-0.5]).unwrap(), [0.25, 0.25]);
        assert_eq!(tf_eval(&m, &[0.0], &[0.0]).unwrap(), [0.0, 0.0]);
        let m = TwiceFold::new(2, 3, 0.0).unwrap();
        assert_eq!(tf_eval(&m, &[0.0, 0.0], &[0.0, 0.0, 0.0]).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn perturbed_value_at_cusp_point() {
        let m = TwiceFold::new(1, 1, 0.2).unwrap();
        let v = tf_eval(&m, &[0.1], &[0.1]).unwrap();
        assert!((v[0] - 0.03).abs() < 1e-15 && (v[1] - 0.03).abs() < 1e-15);
    }

    #[test]
    fn domain_and_parameter_errors() {
        let m = TwiceFold::new(1, 1, 0.2).unwrap();
        assert!(matches!(
            tf_eval(&m, &[1.5], &[0.0]),
            Err(LocalModelError::OutOfDomain { .. })
        ));
        assert!(TwiceFold::new(0, 1, 0.1).is_err());
        assert!(TwiceFold::new(1, 1, 1.0).is_err());
        assert!(TwiceFold::new(1, 1, -0.1).is_err());
    }

    #[test]
    fn fold_and_cusp_forms() {
        assert_eq!(fold_normal(0.3, 2.0), (0.3, 4.0));
        assert_eq!(cusp_normal(0.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn cusp_discriminant() {
        let crit = planar_critical_values(cusp_normal, |_t, x| 3.0 * x * x - _t, [-1.0, -1.0], [1.0, 1.0], 80);
        assert!(crit.len() > 50);
        for (_, [t, y]) in crit {
            assert!((27.0 * y * y - 4.0 * t * t * t).abs() < 1e-6);
        }
    }

    #[test]
    fn fiber_models() {
        assert_eq!(fan_fiber_model(2, 0).unwrap(), (1, 1));
        assert_eq!(fan_fiber_model(4, 1).unwrap(), (2, 2));
        assert_eq!(fan_fiber_model(3, 0).unwrap(), (1, 2));
        assert!(matches!(
            fan_fiber_model(3, 2),
            Err(LocalModelError::IndexOutOfRange { .. })
        ));
        for n in 2..9 {
            for k in 0..=n - 2 {
                assert_eq!(fan_fiber_model(n, k).unwrap(), fan_fiber_model(n, n - 2 - k).unwrap());
            }
        }
    }

    #[test]
    fn singular_set_two_branches() {
        let m = TwiceFold::new(1, 1, 0.2).unwrap();
        let s = tf_singular_set(&m, 64).unwrap();
        assert_eq!(s.branches.len(), 2);
        assert!(!s.self_crossing);
        for b in &s.branches {
            for v in b {
                assert!((v[0] * v[1] - 0.01).abs() < 1e-15);
            }
        }
        let m0 = TwiceFold::new(1, 1, 0.0).unwrap();
        assert!(tf_singular_set(&m0, 64).unwrap().self_crossing);
    }

    #[test]
    fn sampled_higher_models_lie_on_the_hyperbola() {
        let m = TwiceFold::new(2, 2, 0.2).unwrap();
        let s = tf_singular_set(&m, 17).unwrap();
        assert_eq!(s.branches.len(), 2);
        for b in &s.branches {
            for v in b {
                assert!(v[1].abs() < 1e-12 && v[3].abs() < 1e-12);
                assert!((4.0 * v[0] * v[2] - 0.04).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_cusp() {
        let m = TwiceFold::new(1, 1, 0.2).unwrap();
        let cusps = tf_cusps(&m).unwrap();
        assert_eq!(cusps.len(), 1);
        assert!((cusps[0][0] - 0.1).abs() < 1e-12 && (cusps[0][1] - 0.1).abs() < 1e-12);
    }
}
