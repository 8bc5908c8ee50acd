//! Counting preimages of a regular value by multi-start Newton.

use rayon::prelude::*;

use super::linalg::{self, V3};
use super::{Compiled, MapSpec, NumericError};

#[derive(Debug, Clone, PartialEq)]
pub struct FiberCount {
    pub count: usize,
    /// Preimages found on the finer start grid, in lexicographic order.
    pub points: Vec<V3>,
}

fn solve_from(c: &Compiled, spec: &MapSpec, w: [f64; 2], start: V3, scale: f64) -> Option<V3> {
    let tol = spec.tol.newton * scale;
    let mut p = start;
    for _ in 0..60 {
        let rows = [c.grad_g(&p).ok()?, c.grad_f(0, &p).ok()?, c.grad_f(1, &p).ok()?];
        let f = c.map(&p).ok()?;
        let r = [c.g(&p).ok()?, f[0] - w[0], f[1] - w[1]];
        let mut step = linalg::solve3(&rows, &[-r[0], -r[1], -r[2]])?;
        let len = linalg::norm(&step);
        if len > 0.5 * scale {
            step = linalg::scale(&step, 0.5 * scale / len);
        }
        p = linalg::add(&p, &step);
        if !p.iter().all(|v| v.is_finite()) {
            return None;
        }
        let outside = spec
            .bbox
            .iter()
            .zip(&p)
            .any(|([lo, hi], v)| *v < lo - 0.5 * (hi - lo) || *v > hi + 0.5 * (hi - lo));
        if outside {
            return None;
        }
        if len < tol {
            let residual = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
            return (residual < 1e-8 && spec.contains(&p)).then_some(p);
        }
    }
    None
}

fn solutions(c: &Compiled, spec: &MapSpec, w: [f64; 2], n: usize) -> Vec<V3> {
    let scale = spec.scale();
    let b = spec.bbox;
    let at = |i: usize, k: usize| b[k][0] + (b[k][1] - b[k][0]) * (i as f64 + 0.5) / n as f64;
    let found: Vec<V3> = (0..n * n * n)
        .into_par_iter()
        .filter_map(|code| {
            let start = [at(code / (n * n), 0), at((code / n) % n, 1), at(code % n, 2)];
            solve_from(c, spec, w, start, scale)
        })
        .collect();
    let radius = spec.tol.dedup * scale;
    let mut unique: Vec<V3> = Vec::new();
    for p in found {
        if !unique.iter().any(|q| linalg::dist(&p, q) < radius) {
            unique.push(p);
        }
    }
    unique.sort_by(|a, b| {
        a[0].total_cmp(&b[0])
            .then(a[1].total_cmp(&b[1]))
            .then(a[2].total_cmp(&b[2]))
    });
    unique
}

/// Number of points of `{g = 0}` in the box mapping to `w`.
///
/// The count is taken on two start grids (the second twice as fine) and
/// must agree; a preimage where the map is nearly singular means `w` is too
/// close to the contour.
pub fn count_fiber(spec: &MapSpec, w: [f64; 2]) -> Result<FiberCount, NumericError> {
    count_with(&spec.compile(), spec, w)
}

pub(crate) fn count_with(c: &Compiled, spec: &MapSpec, w: [f64; 2]) -> Result<FiberCount, NumericError> {
    let n = spec.tol.fiber_grid;
    let coarse = solutions(c, spec, w, n);
    let fine = solutions(c, spec, w, 2 * n);
    if coarse.len() != fine.len() {
        return Err(NumericError::UnstableCount {
            w,
            coarse: coarse.len(),
            fine: fine.len(),
        });
    }
    for p in &fine {
        let rows = [c.grad_g(p)?, c.grad_f(0, p)?, c.grad_f(1, p)?];
        let size = linalg::norm(&rows[0]) * linalg::norm(&rows[1]) * linalg::norm(&rows[2]);
        if size == 0.0 || linalg::det3(&rows).abs() < spec.tol.clearance * size {
            return Err(NumericError::IllConditioned { w });
        }
    }
    Ok(FiberCount {
        count: fine.len(),
        points: fine,
    })
}
