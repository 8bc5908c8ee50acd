//! Apparent contours of explicit maps `M = {g = 0} -> R^2`.
//!
//! The fold locus is where `h = det[grad g; grad F1; grad F2]` vanishes on
//! the surface. It is traced by continuation, cusps are located where the
//! image velocity reverses, and the contour image is cut into a planar
//! portrait whose faces are labeled by counting preimages.

mod cusps;
mod extract;
mod fiber;
mod linalg;
mod trace;

use std::fmt;

use thiserror::Error;

use crate::expr::{add, mul, parse_expr, sub, Expr, ExprError, Var};

pub use cusps::{detect_cusps, CuspMarker};
pub use extract::{extract_portrait, Extraction};
pub use fiber::{count_fiber, FiberCount};

pub use trace::{trace_fold_locus, FoldCurve};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("map file line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("expression error: {0}")]
    Expr(#[from] ExprError),
    #[error("surface is singular at ({:.6}, {:.6}, {:.6}): |grad g| = {grad:.3e}", .at[0], .at[1], .at[2])]
    Singular { at: [f64; 3], grad: f64 },
    #[error("surface reaches the bounding box boundary near ({:.6}, {:.6}, {:.6})", .at[0], .at[1], .at[2])]
    SurfaceNotEnclosed { at: [f64; 3] },
    #[error("continuation diverged near ({:.6}, {:.6}, {:.6})", .at[0], .at[1], .at[2])]
    Divergence { at: [f64; 3] },
    #[error("fold curve leaves the box near ({:.6}, {:.6}, {:.6}); the source is not closed inside the box", .at[0], .at[1], .at[2])]
    OpenCurve { at: [f64; 3] },
    #[error("image speed is degenerate along fold segment {segment}")]
    DegenerateSpeed { segment: usize },
    #[error("image velocity reverses on fold segment {segment} but its speed only drops to {speed:.3e}")]
    UnresolvedCusp { segment: usize, speed: f64 },
    #[error("point ({:.6}, {:.6}) is within the clearance of the contour", .w[0], .w[1])]
    IllConditioned { w: [f64; 2] },
    #[error("fiber count over ({:.6}, {:.6}) is unstable under refinement: {coarse} vs {fine}", .w[0], .w[1])]
    UnstableCount { w: [f64; 2], coarse: usize, fine: usize },
    #[error("non-transverse contour crossing at ({:.6}, {:.6}): angle {angle_deg:.3} degrees", .at[0], .at[1])]
    Tangential { at: [f64; 2], angle_deg: f64 },
    #[error("could not sample face {face}: {reason}")]
    FaceSampling { face: String, reason: String },
    #[error("sampled fiber counts are inconsistent: {0}")]
    Inconsistent(String),
}

/// Numerical tolerances; every field can be overridden by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Trace step as a fraction of the box half-width.
    pub step: f64,
    /// Smallest allowed step, same units.
    pub step_min: f64,
    pub newton: f64,
    pub dedup: f64,
    pub speed: f64,
    pub clearance: f64,
    /// Minimum crossing angle in degrees.
    pub angle_min: f64,
    pub grad_min: f64,
    /// Seed grid cells per axis.
    pub seed_grid: usize,
    /// Multi-start grid per axis for fiber counting (refined by 2).
    pub fiber_grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            step: 1e-2,
            step_min: 1e-7,
            newton: 1e-10,
            dedup: 1e-6,
            speed: 1e-5,
            clearance: 5e-3,
            angle_min: 5.0,
            grad_min: 1e-8,
            seed_grid: 40,
            fiber_grid: 8,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 10] = [
        "step",
        "step_min",
        "newton",
        "dedup",
        "speed",
        "clearance",
        "angle_min",
        "grad_min",
        "seed_grid",
        "fiber_grid",
    ];

    /// Set a tolerance by name. Grid sizes must be positive integers.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), String> {
        if !value.is_finite() || value <= 0.0 {
            return Err(format!("tolerance {name} must be positive, got {value}"));
        }
        let grid = |v: f64| -> Result<usize, String> {
            if v.fract() != 0.0 || v < 2.0 {
                Err(format!("tolerance {name} must be an integer >= 2"))
            } else {
                Ok(v as usize)
            }
        };
        match name {
            "step" => self.step = value,
            "step_min" => self.step_min = value,
            "newton" => self.newton = value,
            "dedup" => self.dedup = value,
            "speed" => self.speed = value,
            "clearance" => self.clearance = value,
            "angle_min" => self.angle_min = value,
            "grad_min" => self.grad_min = value,
            "seed_grid" => self.seed_grid = grid(value)?,
            "fiber_grid" => self.fiber_grid = grid(value)?,
            _ => return Err(format!("unknown tolerance '{name}'")),
        }
        Ok(())
    }
}

/// Whether the source is a closed surface inside the box, or a piece of a
/// surface cut off by the box (a local model with boundary).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Closed,
    Bounded,
}

/// An implicit surface `{g = 0}` in a box with a map `(F1, F2)` to the plane.
#[derive(Debug, Clone)]
pub struct MapSpec {
    pub surface: Expr,
    pub f1: Expr,
    pub f2: Expr,
    /// `[[xmin, xmax], [ymin, ymax], [zmin, zmax]]`.
    pub bbox: [[f64; 2]; 3],
    pub tol: Tolerances,
    pub domain: Domain,
}

impl MapSpec {
    pub fn new(surface: Expr, f1: Expr, f2: Expr, bbox: [[f64; 2]; 3]) -> Self {
        MapSpec {
            surface,
            f1,
            f2,
            bbox,
            tol: Tolerances::default(),
            domain: Domain::Closed,
        }
    }

    /// Largest half-width of the box; lengths in [`Tolerances`] scale by it.
    pub fn scale(&self) -> f64 {
        self.bbox.iter().map(|[a, b]| 0.5 * (b - a)).fold(0.0, f64::max)
    }

    pub fn contains(&self, p: &[f64; 3]) -> bool {
        self.bbox.iter().zip(p).all(|([a, b], v)| *v >= *a && *v <= *b)
    }

    pub(crate) fn compile(&self) -> Compiled {
        Compiled::new(self)
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "map v1")?;
        writeln!(f, "surface: {}", self.surface)?;
        writeln!(f, "F1: {}", self.f1)?;
        writeln!(f, "F2: {}", self.f2)?;
        let b = &self.bbox;
        writeln!(
            f,
            "box: {} {} {} {} {} {}",
            b[0][0], b[0][1], b[1][0], b[1][1], b[2][0], b[2][1]
        )?;
        if self.domain == Domain::Bounded {
            writeln!(f, "domain: bounded")?;
        }
        Ok(())
    }
}

/// Parse the `map v1` format.
pub fn parse_map_spec(text: &str) -> Result<MapSpec, NumericError> {
    let mut header = false;
    let (mut surface, mut f1, mut f2, mut bbox) = (None, None, None, None);
    let mut tol = Tolerances::default();
    let mut domain = Domain::Closed;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| NumericError::Syntax { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if !header {
            if line != "map v1" {
                return Err(err(format!("expected 'map v1' header, found '{line}'")));
            }
            header = true;
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| err(format!("expected 'key: value', found '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let expr = |v: &str| parse_expr(v).map_err(|e| err(e.to_string()));
        match key {
            "surface" => surface = Some(expr(value)?),
            "F1" => f1 = Some(expr(value)?),
            "F2" => f2 = Some(expr(value)?),
            "box" => {
                let nums: Vec<f64> = value
                    .split_whitespace()
                    .map(|s| s.parse::<f64>().map_err(|_| err(format!("bad number '{s}' in box"))))
                    .collect::<Result<_, _>>()?;
                if nums.len() != 6 {
                    return Err(err(format!("box needs 6 numbers, found {}", nums.len())));
                }
                let b = [[nums[0], nums[1]], [nums[2], nums[3]], [nums[4], nums[5]]];
                if b.iter().any(|[lo, hi]| lo.is_nan() || hi.is_nan() || lo >= hi) {
                    return Err(err("box bounds must satisfy min < max".to_string()));
                }
                bbox = Some(b);
            }
            "domain" => {
                domain = match value {
                    "closed" => Domain::Closed,
                    "bounded" => Domain::Bounded,
                    _ => return Err(err(format!("unknown domain '{value}'"))),
                }
            }
            _ => {
                if let Some(name) = key.strip_prefix("tol.") {
                    let v: f64 = value.parse().map_err(|_| err(format!("bad number '{value}'")))?;
                    tol.set(name, v).map_err(err)?;
                } else {
                    return Err(err(format!("unknown key '{key}'")));
                }
            }
        }
    }
    let last = text.lines().count().max(1);
    let missing = |what: &str| NumericError::Syntax {
        line: last,
        message: format!("missing '{what}'"),
    };
    if !header {
        return Err(NumericError::Syntax {
            line: 1,
            message: "empty map file".to_string(),
        });
    }
    Ok(MapSpec {
        surface: surface.ok_or_else(|| missing("surface"))?,
        f1: f1.ok_or_else(|| missing("F1"))?,
        f2: f2.ok_or_else(|| missing("F2"))?,
        bbox: bbox.ok_or_else(|| missing("box"))?,
        tol,
        domain,
    })
}

/// Derivatives needed by the engine, built once per spec.
pub(crate) struct Compiled {
    pub g: Expr,
    pub dg: [Expr; 3],
    pub f: [Expr; 2],
    pub df: [[Expr; 3]; 2],
    pub h: Expr,
    pub dh: [Expr; 3],
}

fn det3(r: &[[Expr; 3]; 3]) -> Expr {
    let minor = |a: usize, b: usize, c: usize, d: usize| {
        sub(
            mul(r[1][a].clone(), r[2][b].clone()),
            mul(r[1][c].clone(), r[2][d].clone()),
        )
    };
    let t0 = mul(r[0][0].clone(), minor(1, 2, 2, 1));
    let t1 = mul(r[0][1].clone(), minor(0, 2, 2, 0));
    let t2 = mul(r[0][2].clone(), minor(0, 1, 1, 0));
    add(sub(t0, t1), t2)
}

impl Compiled {
    fn new(spec: &MapSpec) -> Self {
        let dg = spec.surface.grad();
        let df = [spec.f1.grad(), spec.f2.grad()];
        let h = det3(&[dg.clone(), df[0].clone(), df[1].clone()]);
        let dh = [h.derivative(Var::X), h.derivative(Var::Y), h.derivative(Var::Z)];
        Compiled {
            g: spec.surface.clone(),
            dg,
            f: [spec.f1.clone(), spec.f2.clone()],
            df,
            h,
            dh,
        }
    }

    pub fn g(&self, p: &[f64; 3]) -> Result<f64, ExprError> {
        self.g.eval_at(p)
    }

    pub fn grad_g(&self, p: &[f64; 3]) -> Result<[f64; 3], ExprError> {
        Ok([self.dg[0].eval_at(p)?, self.dg[1].eval_at(p)?, self.dg[2].eval_at(p)?])
    }

    pub fn h(&self, p: &[f64; 3]) -> Result<f64, ExprError> {
        self.h.eval_at(p)
    }

    pub fn grad_h(&self, p: &[f64; 3]) -> Result<[f64; 3], ExprError> {
        Ok([self.dh[0].eval_at(p)?, self.dh[1].eval_at(p)?, self.dh[2].eval_at(p)?])
    }

    pub fn map(&self, p: &[f64; 3]) -> Result<[f64; 2], ExprError> {
        Ok([self.f[0].eval_at(p)?, self.f[1].eval_at(p)?])
    }

    pub fn grad_f(&self, k: usize, p: &[f64; 3]) -> Result<[f64; 3], ExprError> {
        let d = &self.df[k];
        Ok([d[0].eval_at(p)?, d[1].eval_at(p)?, d[2].eval_at(p)?])
    }

    /// Image of a tangent vector.
    pub fn push(&self, p: &[f64; 3], t: &[f64; 3]) -> Result<[f64; 2], ExprError> {
        Ok([linalg::dot(&self.grad_f(0, p)?, t), linalg::dot(&self.grad_f(1, p)?, t)])
    }
}
