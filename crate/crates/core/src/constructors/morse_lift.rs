//! Lifting a Morse function `M -> R` to a map `M -> R^2` whose first
//! coordinate is the given function.
//!
//! Every level circle is drawn as a horizontal lane (fiber count 2 inside).
//! Reading the critical values left to right:
//!
//! * index 0 opens a lane in a fresh slot above the others,
//! * index 2 closes the top lane,
//! * index 1 splits the lane when only one is open, and otherwise merges
//!   the top two lanes.
//!
//! Each event is a parabolic cap whose apex sits exactly at the critical
//! value, so the horizontal height function recovers the input list.

use std::collections::HashMap;

use super::{face, ConstructError};
use crate::portrait::{signed_area, winding_number, Circle, FiberLabel, Point, Portrait};

const CAP_SAMPLES: i32 = 8;
const LANE_WIDTH: f64 = 4.0;
const LANE_GAP: f64 = 1.0;

struct Lane {
    lo: f64,
    hi: f64,
    /// Open boundary lines `(y, x_start)` along the bottom and top.
    lower: (f64, f64),
    upper: (f64, f64),
}

struct Builder {
    pieces: Vec<Vec<Point>>,
    depth: f64,
}

impl Builder {
    fn line(&mut self, (y, x0): (f64, f64), x1: f64) {
        self.pieces.push(vec![Point::new(x0, y), Point::new(x1, y)]);
    }

    /// Parabolic cap with apex `(v, mid)` spanning `mid +- half`, opening
    /// to the right (`dir = 1`) or the left (`dir = -1`).
    fn cap(&mut self, v: f64, mid: f64, half: f64, dir: f64) {
        let pts = (-CAP_SAMPLES..=CAP_SAMPLES)
            .map(|j| {
                let s = j as f64 / CAP_SAMPLES as f64;
                Point::new(v + dir * self.depth * s * s, mid + half * s)
            })
            .collect();
        self.pieces.push(pts);
    }
}

fn key(p: Point) -> (u64, u64) {
    ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits())
}

/// Join pieces that share endpoints into closed polylines.
fn chain(pieces: Vec<Vec<Point>>) -> Vec<Vec<Point>> {
    let mut at: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    for (i, p) in pieces.iter().enumerate() {
        at.entry(key(p[0])).or_default().push(i);
        at.entry(key(p[p.len() - 1])).or_default().push(i);
    }
    let mut used = vec![false; pieces.len()];
    let mut loops = Vec::new();
    for start in 0..pieces.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut pts: Vec<Point> = pieces[start].clone();
        let origin = key(pts[0]);
        loop {
            let end = *pts.last().expect("non-empty piece");
            if key(end) == origin {
                pts.pop();
                break;
            }
            let next = at[&key(end)]
                .iter()
                .copied()
                .find(|&i| !used[i])
                .expect("every piece end is shared");
            used[next] = true;
            let mut seg = pieces[next].clone();
            if key(seg[0]) != key(end) {
                seg.reverse();
            }
            pts.extend_from_slice(&seg[1..]);
        }
        loops.push(pts);
    }
    loops
}

/// Build the lifted portrait of a Morse function with the given
/// `(critical value, index)` list.
pub fn morse_lift(critical: &[(f64, u8)]) -> Result<Portrait, ConstructError> {
    let err = |position: usize, reason: &str| ConstructError::MorseSequence {
        position,
        reason: reason.to_string(),
    };
    if critical.is_empty() {
        return Err(err(0, "empty sequence"));
    }
    if critical[0].1 != 0 {
        return Err(err(0, "first index must be 0"));
    }
    let mut count = 0i64;
    for (i, &(v, k)) in critical.iter().enumerate() {
        if !v.is_finite() {
            return Err(err(i, "value is not finite"));
        }
        if i > 0 && v <= critical[i - 1].0 {
            return Err(err(i, "values must be strictly increasing"));
        }
        count += match k {
            0 => 2,
            1 if count == 2 => 2,
            1 if count >= 4 => -2,
            1 => return Err(err(i, "index 1 with no open level circle")),
            2 => -2,
            _ => return Err(err(i, "index must be 0, 1 or 2")),
        };
        if count < 0 {
            return Err(err(i, "fiber count drops below 0"));
        }
    }
    if count != 0 {
        return Err(err(critical.len(), &format!("fiber count ends at {count}, not 0")));
    }
    if critical[critical.len() - 1].1 != 2 {
        return Err(err(critical.len() - 1, "last index must be 2"));
    }

    let gap = critical
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(f64::INFINITY, f64::min);
    let depth = if gap.is_finite() { gap / 4.0 } else { 1.0 };
    let mut b = Builder {
        pieces: Vec::new(),
        depth,
    };
    // Open lanes sorted bottom to top.
    let mut lanes: Vec<Lane> = Vec::new();
    for &(v, k) in critical {
        match (k, lanes.len()) {
            (0, _) => {
                let lo = lanes.last().map_or(0.0, |l| l.hi + LANE_GAP);
                let hi = lo + LANE_WIDTH;
                b.cap(v, (lo + hi) / 2.0, (hi - lo) / 2.0, 1.0);
                let x = v + depth;
                lanes.push(Lane {
                    lo,
                    hi,
                    lower: (lo, x),
                    upper: (hi, x),
                });
            }
            (2, _) => {
                let l = lanes.pop().expect("count checked");
                b.cap(v, (l.lo + l.hi) / 2.0, (l.hi - l.lo) / 2.0, -1.0);
                b.line(l.lower, v - depth);
                b.line(l.upper, v - depth);
            }
            (1, 1) => {
                let l = lanes.pop().expect("count checked");
                let mid = (l.lo + l.hi) / 2.0;
                let g = (l.hi - l.lo) / 4.0;
                b.cap(v, mid, g, 1.0);
                let x = v + depth;
                lanes.push(Lane {
                    lo: l.lo,
                    hi: mid - g,
                    lower: l.lower,
                    upper: (mid - g, x),
                });
                lanes.push(Lane {
                    lo: mid + g,
                    hi: l.hi,
                    lower: (mid + g, x),
                    upper: l.upper,
                });
            }
            _ => {
                let top = lanes.pop().expect("count checked");
                let below = lanes.pop().expect("count checked");
                b.cap(v, (below.hi + top.lo) / 2.0, (top.lo - below.hi) / 2.0, -1.0);
                b.line(below.upper, v - depth);
                b.line(top.lower, v - depth);
                lanes.push(Lane {
                    lo: below.lo,
                    hi: top.hi,
                    lower: below.lower,
                    upper: top.upper,
                });
            }
        }
    }

    let mut loops = chain(b.pieces);
    for l in &mut loops {
        if signed_area(l) < 0.0 {
            l.reverse();
        }
    }
    let areas: Vec<f64> = loops.iter().map(|l| signed_area(l)).collect();
    let mut p = Portrait::new(2);
    p.faces.push(face("f0", FiberLabel::Count(0), true));
    for (i, l) in loops.iter().enumerate() {
        let containing: Vec<usize> = (0..loops.len())
            .filter(|&j| j != i && winding_number(l[0], &loops[j]) != 0)
            .collect();
        let parent = containing
            .iter()
            .copied()
            .min_by(|&a, &c| areas[a].total_cmp(&areas[c]));
        let count = if containing.len().is_multiple_of(2) { 2 } else { 0 };
        p.faces
            .push(face(&format!("f{}", i + 1), FiberLabel::Count(count), false));
        p.circles.push(Circle {
            id: format!("c{}", i + 1),
            left: format!("f{}", i + 1),
            right: parent.map_or("f0".to_string(), |j| format!("f{}", j + 1)),
            chi: None,
            points: Some(l.clone()),
        });
    }
    Ok(p)
}
