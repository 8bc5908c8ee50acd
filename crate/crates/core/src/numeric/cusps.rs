//! Cusps on a traced fold curve: points where the image velocity of the
//! fold curve vanishes and reverses.

use super::linalg::{self, V3};
use super::trace::{FoldCurve, Tracer};
use super::{MapSpec, NumericError};

#[derive(Debug, Clone, PartialEq)]
pub struct CuspMarker {
    /// The cusp lies on segment `segment` (from point `segment` to the
    /// next one) at fraction `param`.
    pub segment: usize,
    pub param: f64,
    pub point: V3,
    pub image: [f64; 2],
    /// Residual image speed at the located minimum.
    pub speed: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Cusp markers of one fold curve, in curve order.
pub fn detect_cusps(spec: &MapSpec, curve: &FoldCurve) -> Result<Vec<CuspMarker>, NumericError> {
    let tracer = Tracer::new(spec);
    detect_with(&tracer, curve)
}

pub(crate) fn detect_with(tracer: &Tracer, curve: &FoldCurve) -> Result<Vec<CuspMarker>, NumericError> {
    let speed_tol = tracer.spec.tol.speed;
    let m = curve.points.len();
    let velocity: Vec<[f64; 2]> = curve
        .points
        .iter()
        .zip(&curve.tangents)
        .map(|(p, t)| tracer.c.push(p, t))
        .collect::<Result<_, _>>()?;
    let speed = |u: &[f64; 2]| (u[0] * u[0] + u[1] * u[1]).sqrt();
    let mut out = Vec::new();
    for i in 0..curve.segment_count() {
        let j = (i + 1) % m;
        let (ua, ub) = (velocity[i], velocity[j]);
        if speed(&ua) < speed_tol && speed(&ub) < speed_tol {
            return Err(NumericError::DegenerateSpeed { segment: i });
        }
        if ua[0] * ub[0] + ua[1] * ub[1] >= 0.0 {
            continue;
        }
        let (a, b) = (curve.points[i], curve.points[j]);
        let orient = curve.tangents[i];
        let reach = linalg::dist(&a, &b);
        let probe = |t: f64| -> Option<(V3, f64)> {
            let q = tracer.correct(&linalg::lerp(&a, &b, t), reach)?;
            let mut tq = tracer.tangent(&q).ok()?;
            if linalg::dot(&tq, &orient) < 0.0 {
                tq = linalg::scale(&tq, -1.0);
            }
            let u = tracer.c.push(&q, &tq).ok()?;
            Some((q, speed(&u)))
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let fail = || NumericError::Divergence { at: a };
        let mut f1 = probe(x1).ok_or_else(fail)?.1;
        let mut f2 = probe(x2).ok_or_else(fail)?.1;
        while hi - lo > 1e-9 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = probe(x1).ok_or_else(fail)?.1;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = probe(x2).ok_or_else(fail)?.1;
            }
        }
        let t = 0.5 * (lo + hi);
        let (point, s) = probe(t).ok_or_else(fail)?;
        if s > speed_tol {
            return Err(NumericError::UnresolvedCusp { segment: i, speed: s });
        }
        out.push(CuspMarker {
            segment: i,
            param: t,
            point,
            image: tracer.c.map(&point)?,
            speed: s,
        });
    }
    Ok(out)
}
