use std::collections::{BTreeMap, VecDeque};

use super::AnalysisError;
use crate::portrait::{validate, Portrait, Rule};

pub const DEFAULT_ENUMERATION_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Given,
    Propagated,
    Enumerated,
}

/// Fiber point counts on every face of a surface portrait.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pub counts: BTreeMap<String, i64>,
    pub provenance: Provenance,
}

impl Labeling {
    pub fn get(&self, face: &str) -> Option<i64> {
        self.counts.get(face).copied()
    }

    /// Labeling read directly off the portrait's face labels, if total.
    pub fn from_portrait(p: &Portrait) -> Option<Labeling> {
        let counts = p.pinned_counts();
        (counts.len() == p.faces.len()).then_some(Labeling {
            counts,
            provenance: Provenance::Given,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub labelings: Vec<Labeling>,
    /// Set when the search stopped at the cap.
    pub overflow: bool,
}

struct Search {
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    neighbours: Vec<Vec<usize>>,
    pins: Vec<Option<i64>>,
    unbounded: usize,
    cap: usize,
    found: Vec<Vec<i64>>,
    overflow: bool,
}

impl Search {
    fn build(p: &Portrait, pins: &BTreeMap<String, i64>, cap: usize) -> Option<Self> {
        let n = p.faces.len();
        let unbounded = p.faces.iter().position(|f| f.unbounded)?;
        let mut neighbours = vec![Vec::new(); n];
        for (a, b, _) in p.face_adjacency() {
            neighbours[a].push(b);
            if a != b {
                neighbours[b].push(a);
            }
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = vec![unbounded];
        seen[unbounded] = true;
        let mut queue = VecDeque::from([unbounded]);
        while let Some(f) = queue.pop_front() {
            for &g in &neighbours[f] {
                if !seen[g] {
                    seen[g] = true;
                    parent[g] = Some(f);
                    order.push(g);
                    queue.push_back(g);
                }
            }
        }
        if order.len() != n {
            return None;
        }
        let pins = p.faces.iter().map(|f| pins.get(&f.id).copied()).collect();
        Some(Search {
            order,
            parent,
            neighbours,
            pins,
            unbounded,
            cap,
            found: Vec::new(),
            overflow: false,
        })
    }

    fn run(&mut self) {
        let mut values = vec![None; self.order.len()];
        self.descend(0, &mut values);
    }

    fn descend(&mut self, depth: usize, values: &mut Vec<Option<i64>>) {
        if self.overflow {
            return;
        }
        if depth == self.order.len() {
            if self.found.len() == self.cap {
                self.overflow = true;
                return;
            }
            self.found.push(values.iter().map(|v| v.unwrap()).collect());
            return;
        }
        let f = self.order[depth];
        let candidates: Vec<i64> = if f == self.unbounded {
            vec![0]
        } else {
            let pv = values[self.parent[f].unwrap()].unwrap();
            vec![pv - 2, pv + 2]
        };
        for c in candidates {
            if c < 0 || self.pins[f].is_some_and(|pin| pin != c) {
                continue;
            }
            let fits = self.neighbours[f].iter().all(|&g| {
                if g == f {
                    return false;
                }
                values[g].is_none_or(|v| (v - c).abs() == 2)
            });
            if fits {
                values[f] = Some(c);
                self.descend(depth + 1, values);
                values[f] = None;
            }
        }
    }
}

fn face_ids_sorted(p: &Portrait) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.faces.len()).collect();
    idx.sort_by(|&a, &b| crate::portrait::natural_cmp(&p.faces[a].id, &p.faces[b].id));
    idx
}

fn to_labeling(p: &Portrait, values: &[i64], provenance: Provenance) -> Labeling {
    Labeling {
        counts: p.faces.iter().zip(values).map(|(f, v)| (f.id.clone(), *v)).collect(),
        provenance,
    }
}

fn check_surface(p: &Portrait) -> Result<(), AnalysisError> {
    if p.dim != 2 {
        return Err(AnalysisError::NotSurface(p.dim));
    }
    Ok(())
}

/// Every labeling of a surface portrait with even, nonnegative counts,
/// an empty unbounded face, and a change of exactly 2 across each contour
/// element. Results come in canonical order (face ids sorted, values
/// compared lexicographically).
pub fn enumerate_labelings(p: &Portrait, max_count: usize) -> Result<Enumeration, AnalysisError> {
    check_surface(p)?;
    let labelings = match Search::build(p, &BTreeMap::new(), max_count) {
        Some(mut s) => {
            s.run();
            let order = face_ids_sorted(p);
            let mut found = s.found;
            found.sort_by(|a, b| {
                let ka: Vec<i64> = order.iter().map(|&i| a[i]).collect();
                let kb: Vec<i64> = order.iter().map(|&i| b[i]).collect();
                ka.cmp(&kb)
            });
            return Ok(Enumeration {
                labelings: found
                    .iter()
                    .map(|v| to_labeling(p, v, Provenance::Enumerated))
                    .collect(),
                overflow: s.overflow,
            });
        }
        None => Vec::new(),
    };
    Ok(Enumeration {
        labelings,
        overflow: false,
    })
}

/// Complete the face labels of a surface portrait from its pinned faces.
///
/// The unbounded face is 0; each other face is forced from its neighbours
/// by the rule that counts change by exactly 2 across a fold. Fails with
/// the offending faces when the pins contradict each other, and when the
/// pins leave some face undetermined.
pub fn propagate(p: &Portrait) -> Result<Labeling, AnalysisError> {
    check_surface(p)?;
    // Label problems are reported below with the faces involved.
    let structural = validate(p)
        .into_iter()
        .find(|v| !matches!(v.rule, Rule::FiberParity | Rule::NegativeFiber | Rule::OuterFiber));
    if let Some(v) = structural {
        return Err(AnalysisError::Invalid(v.to_string()));
    }
    let pins = p.pinned_counts();
    for (face, &count) in &pins {
        if count < 0 {
            return Err(AnalysisError::NegativeCount {
                face: face.clone(),
                count,
            });
        }
    }

    let Some(mut search) = Search::build(p, &pins, 2) else {
        return Err(AnalysisError::Invalid(
            "face adjacency graph is disconnected".to_string(),
        ));
    };

    // Cheap, explainable checks first: parity against the distance from the
    // unbounded face, then adjacent pins.
    let depth = {
        let mut d = vec![0usize; p.faces.len()];
        for &f in search.order.iter().skip(1) {
            d[f] = d[search.parent[f].unwrap()] + 1;
        }
        d
    };
    for &f in &search.order {
        let Some(pin) = search.pins[f] else { continue };
        if pin % 2 != 0 || (pin / 2 - depth[f] as i64) % 2 != 0 {
            let mut path = vec![p.faces[f].id.clone()];
            let mut cur = f;
            while let Some(up) = search.parent[cur] {
                path.push(p.faces[up].id.clone());
                cur = up;
            }
            path.reverse();
            return Err(AnalysisError::Contradiction {
                faces: path,
                reason: format!(
                    "face {} pinned to {pin} but is {} fold crossings from the unbounded face",
                    p.faces[f].id, depth[f]
                ),
            });
        }
    }
    for (a, b, _) in p.face_adjacency() {
        if let (Some(x), Some(y)) = (search.pins[a], search.pins[b]) {
            if (x - y).abs() != 2 {
                return Err(AnalysisError::Contradiction {
                    faces: vec![p.faces[a].id.clone(), p.faces[b].id.clone()],
                    reason: format!("adjacent faces pinned to {x} and {y}"),
                });
            }
        }
    }

    search.run();
    match search.found.len() {
        0 => Err(AnalysisError::Contradiction {
            faces: pins.keys().cloned().collect(),
            reason: "no labeling satisfies the pinned faces".to_string(),
        }),
        1 => Ok(to_labeling(p, &search.found[0], Provenance::Propagated)),
        _ => {
            let (a, b) = (&search.found[0], &search.found[1]);
            let i = (0..a.len()).find(|&i| a[i] != b[i]).unwrap();
            let mut candidates = vec![a[i], b[i]];
            candidates.sort_unstable();
            Err(AnalysisError::Underdetermined {
                face: p.faces[i].id.clone(),
                candidates,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portrait::fixtures::*;

    fn values(l: &Labeling) -> Vec<i64> {
        l.counts.values().copied().collect()
    }

    #[test]
    fn sphere_propagates() {
        let mut p = sphere();
        p.faces[1].label = None;
        let l = propagate(&p).unwrap();
        assert_eq!(values(&l), vec![0, 2]);
        assert_eq!(l.provenance, Provenance::Propagated);
    }

    #[test]
    fn torus_propagates_with_pins() {
        let l = propagate(&nested(Some(0))).unwrap();
        assert_eq!(values(&l), vec![0, 2, 0]);
    }

    #[test]
    fn odd_pin_is_a_contradiction() {
        let mut p = sphere();
        p.faces[1].label = Some(crate::portrait::FiberLabel::Count(3));
        match propagate(&p) {
            Err(AnalysisError::Contradiction { faces, .. }) => assert_eq!(faces, vec!["f0", "f1"]),
            other => panic!("unexpected {other:?}"),
        }

        // Parity against distance, with an even pin.
        let mut p = nested(Some(2));
        p.faces[1].label = None;
        match propagate(&p) {
            Err(AnalysisError::Contradiction { faces, .. }) => assert_eq!(faces, vec!["f0", "f1", "f2"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unpinned_inner_face_is_underdetermined() {
        match propagate(&nested(None)) {
            Err(AnalysisError::Underdetermined { face, candidates }) => {
                assert_eq!(face, "f2");
                assert_eq!(candidates, vec![0, 4]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn enumerate_nested_and_side_by_side() {
        let e = enumerate_labelings(&nested(None), 100).unwrap();
        let all: Vec<Vec<i64>> = e.labelings.iter().map(values).collect();
        assert_eq!(all, vec![vec![0, 2, 0], vec![0, 2, 4]]);
        assert!(!e.overflow);

        let mut p = sphere();
        p.circles.push(circle("c2", "f2", "f0"));
        p.faces.push(face("f2", None, false));
        let e = enumerate_labelings(&p, 100).unwrap();
        assert_eq!(e.labelings.len(), 1);
        assert_eq!(values(&e.labelings[0]), vec![0, 2, 2]);
    }

    #[test]
    fn cap_sets_overflow() {
        let e = enumerate_labelings(&nested(None), 1).unwrap();
        assert_eq!(e.labelings.len(), 1);
        assert!(e.overflow);
    }
}
