use super::{AnalysisError, Labeling};
use crate::portrait::{FiberLabel, Portrait, VertexKind};

/// Euler characteristic of the source manifold read off a labeled portrait.
///
/// Sums `chi(fiber) * chi_c(stratum)` over faces, open arcs and vertices
/// (vertex-free circles have `chi_c = 0`).
///
/// For surfaces the fibers are finite sets and are derived from the face
/// counts: `n_low + 1` over an open fold arc, `n_low` over a cusp (the
/// cusp point is the limit of the sheet that folds), and `n_min + 2` over a
/// crossing. Here `n_low` / `n_min` is the smallest count among the
/// adjacent faces. For higher dimensions every face, arc and vertex must
/// carry a fiber `chi` label.
pub fn stratified_chi(p: &Portrait, labeling: Option<&Labeling>) -> Result<i64, AnalysisError> {
    let chi_c = p.faces_chi_c();
    if p.dim == 2 {
        let owned;
        let labeling = match labeling {
            Some(l) => l,
            None => {
                owned = Labeling::from_portrait(p)
                    .ok_or_else(|| AnalysisError::MissingLabel("faces (no complete labeling)".to_string()))?;
                &owned
            }
        };
        let count = |face: &str| {
            labeling
                .get(face)
                .ok_or_else(|| AnalysisError::MissingLabel(face.to_string()))
        };
        let mut total = 0i64;
        for f in &p.faces {
            total += count(&f.id)? * chi_c[&f.id];
        }
        for a in &p.arcs {
            let low = count(&a.left)?.min(count(&a.right)?);
            total -= low + 1;
        }
        for v in &p.vertices {
            let mut low = i64::MAX;
            for f in p.local_faces(&v.id) {
                low = low.min(count(f)?);
            }
            if low == i64::MAX {
                return Err(AnalysisError::MissingLabel(format!("faces around {}", v.id)));
            }
            total += match v.kind {
                VertexKind::Cusp => low,
                VertexKind::Crossing => low + 2,
            };
        }
        return Ok(total);
    }

    let mut total = 0i64;
    for f in &p.faces {
        let chi = match f.label {
            Some(FiberLabel::Chi(c)) => c,
            _ => return Err(AnalysisError::MissingLabel(f.id.clone())),
        };
        total += chi * chi_c[&f.id];
    }
    for a in &p.arcs {
        total -= a.chi.ok_or_else(|| AnalysisError::MissingLabel(a.id.clone()))?;
    }
    for v in &p.vertices {
        total += v.chi.ok_or_else(|| AnalysisError::MissingLabel(v.id.clone()))?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThomVerdict {
    Pass,
    Fail,
}

impl ThomVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ThomVerdict::Pass => "pass",
            ThomVerdict::Fail => "fail",
        }
    }
}

/// Number of cusps against the Euler characteristic, modulo 2.
pub fn thom_parity(p: &Portrait, chi: i64) -> ThomVerdict {
    if (p.cusp_count() as i64 - chi).rem_euclid(2) == 0 {
        ThomVerdict::Pass
    } else {
        ThomVerdict::Fail
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::propagate;
    use crate::portrait::fixtures::*;
    use crate::portrait::{Arc, Vertex};

    #[test]
    fn sphere_and_torus() {
        assert_eq!(stratified_chi(&sphere(), None).unwrap(), 2);
        assert_eq!(stratified_chi(&nested(Some(0)), None).unwrap(), 0);
        assert_eq!(stratified_chi(&nested(Some(4)), None).unwrap(), 4);
    }

    #[test]
    fn missing_label() {
        assert!(matches!(
            stratified_chi(&nested(None), None),
            Err(AnalysisError::MissingLabel(_))
        ));
    }

    #[test]
    fn lips_inside_a_circle() {
        // Outer circle (count 2 inside) holding a lips: two cusps joined by
        // two arcs, count 4 inside. The lips region is a disk.
        let mut p = sphere();
        for v in ["v1", "v2"] {
            p.vertices.push(Vertex {
                id: v.into(),
                kind: VertexKind::Cusp,
                position: None,
                index: None,
                chi: None,
            });
        }
        for (id, from, to) in [("a1", "v1", "v2"), ("a2", "v2", "v1")] {
            p.arcs.push(Arc {
                id: id.into(),
                from: from.into(),
                to: to.into(),
                left: "f2".into(),
                right: "f1".into(),
                chi: None,
                points: None,
            });
        }
        p.faces.push(face("f2", Some(4), false));
        assert!(crate::portrait::validate(&p).is_empty());
        let l = propagate(&p).unwrap();
        // faces: 0*0 + 2*0 + 4*1; arcs: -(2+1)*2; cusps: +2*2.
        assert_eq!(stratified_chi(&p, Some(&l)).unwrap(), 2);
        assert_eq!(thom_parity(&p, 2), ThomVerdict::Pass);
    }

    #[test]
    fn parity() {
        let mut p = sphere();
        assert_eq!(thom_parity(&p, 2), ThomVerdict::Pass);
        for k in 0..3 {
            p.vertices.push(Vertex {
                id: format!("v{k}"),
                kind: VertexKind::Cusp,
                position: None,
                index: None,
                chi: None,
            });
        }
        assert_eq!(thom_parity(&p, 3), ThomVerdict::Pass);
        p.vertices.truncate(1);
        assert_eq!(thom_parity(&p, 2), ThomVerdict::Fail);
    }
}
