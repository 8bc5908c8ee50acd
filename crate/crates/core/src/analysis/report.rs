//! Line-oriented `KEY=value` reports.

use std::fmt::Write as _;

use super::{Enumeration, Labeling, MorseDatum, ThomVerdict};
use crate::portrait::natural_cmp;

pub fn chi_line(chi: i64) -> String {
    format!("CHI={chi}")
}

pub fn cusps_line(cusps: usize) -> String {
    format!("CUSPS={cusps}")
}

pub fn thom_line(v: ThomVerdict) -> String {
    format!("THOM={}", v.as_str())
}

/// `LABELING f0=0 f1=2`, faces in natural id order.
pub fn labeling_line(l: &Labeling) -> String {
    let mut faces: Vec<(&String, &i64)> = l.counts.iter().collect();
    faces.sort_by(|a, b| natural_cmp(a.0, b.0));
    let mut s = String::from("LABELING");
    for (f, n) in faces {
        let _ = write!(s, " {f}={n}");
    }
    s
}

pub fn enumeration_lines(e: &Enumeration) -> Vec<String> {
    let mut lines = vec![format!("LABELINGS={}", e.labelings.len())];
    if e.overflow {
        lines.push("OVERFLOW=true".to_string());
    }
    lines.extend(e.labelings.iter().map(labeling_line));
    lines
}

pub fn morse_lines(data: &[MorseDatum]) -> Vec<String> {
    data.iter()
        .map(|d| format!("MORSE v={} i={}", d.value, d.index))
        .collect()
}

/// Parse `MORSE v=<val> i=<idx>` back into `(value, index)`.
pub fn parse_morse_line(line: &str) -> Option<(f64, u8)> {
    let rest = line.strip_prefix("MORSE ")?;
    let mut it = rest.split_whitespace();
    let v = it.next()?.strip_prefix("v=")?.parse().ok()?;
    let i = it.next()?.strip_prefix("i=")?.parse().ok()?;
    Some((v, i))
}
