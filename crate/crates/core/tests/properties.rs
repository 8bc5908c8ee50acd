use proptest::prelude::*;

use portraitforge::analysis::{enumerate_labelings, propagate, stratified_chi, thom_parity, ThomVerdict};
use portraitforge::constructors::{genus_surface_portrait, morse_lift, toric_portrait};
use portraitforge::expr::parse_expr;
use portraitforge::local_models::{fan_fiber_model, tf_eval, TwiceFold};
use portraitforge::portrait::{parse_portrait, serialize_portrait, validate};

/// Valid critical sequences: the circle count never hits zero mid-way
/// without a fresh minimum, and ends at zero on a maximum.
fn critical_sequence() -> impl Strategy<Value = Vec<(f64, u8)>> {
    (
        1usize..=6,
        prop::collection::vec(any::<u32>(), 12),
        prop::collection::vec(1u32..400, 12),
    )
        .prop_map(|(half, choices, gaps)| {
            let len = 2 * half;
            let closable = |c: usize, left: usize| c <= left && (left - c).is_multiple_of(2);
            let mut out = Vec::new();
            let (mut circles, mut v) = (0usize, 0.0f64);
            for i in 0..len {
                let left = len - i - 1;
                let next = |k: u8| match (k, circles) {
                    (0, c) => Some(c + 1),
                    (1, 1) => Some(2),
                    (1, c) | (2, c) if c >= 1 => Some(c - 1),
                    _ => None,
                };
                let options: Vec<u8> = (0..3).filter(|&k| next(k).is_some_and(|c| closable(c, left))).collect();
                let k = options[choices[i] as usize % options.len()];
                circles = next(k).unwrap();
                out.push((v, k));
                v += gaps[i] as f64 / 100.0;
            }
            out
        })
}

fn rotation(t: f64) -> [[f64; 2]; 2] {
    [[t.cos(), -t.sin()], [t.sin(), t.cos()]]
}

fn apply(m: [[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn morse_lift_round_trips(s in critical_sequence()) {
        let p = morse_lift(&s).unwrap();
        prop_assert!(validate(&p).is_empty());
        let l = propagate(&p).unwrap();
        let data = portraitforge::analysis::levine_morse_data(&p, &l, 0.0).unwrap();
        let got: Vec<(f64, u8)> = data.iter().map(|d| (d.value, d.index)).collect();
        prop_assert_eq!(got, s);
    }

    #[test]
    fn serialization_round_trips(s in critical_sequence(), g in 0usize..5) {
        for p in [morse_lift(&s).unwrap(), genus_surface_portrait(g)] {
            let text = serialize_portrait(&p);
            let back = parse_portrait(&text).unwrap();
            prop_assert_eq!(serialize_portrait(&back), text);
        }
    }

    #[test]
    fn unimodular_images_of_delzant_polygons(a in -3i64..=3, b in -3i64..=3, dx in -5i64..=5, dy in -5i64..=5, square in any::<bool>()) {
        // [[1, a], [0, 1]] [[1, 0], [b, 1]] has determinant 1.
        let m = [[1 + a * b, a], [b, 1]];
        let base: &[(i64, i64)] = if square { &[(0, 0), (1, 0), (1, 1), (0, 1)] } else { &[(0, 0), (1, 0), (0, 1)] };
        let poly: Vec<(i64, i64)> = base.iter().map(|&(x, y)| (m[0][0] * x + m[0][1] * y + dx, m[1][0] * x + m[1][1] * y + dy)).collect();
        let p = toric_portrait(&poly).unwrap();
        let chi = stratified_chi(&p, None).unwrap();
        prop_assert_eq!(p.cusp_count(), base.len());
        prop_assert_eq!(chi, base.len() as i64);
        prop_assert_eq!(thom_parity(&p, chi), ThomVerdict::Pass);
    }

    #[test]
    fn enumerated_labelings_are_valid(g in 0usize..4) {
        let mut p = genus_surface_portrait(g);
        for f in &mut p.faces {
            f.label = None;
        }
        let e = enumerate_labelings(&p, 1000).unwrap();
        // Outer face 0, body 2, each hole 0 or 4.
        prop_assert_eq!(e.labelings.len(), 1 << g);
        for l in &e.labelings {
            let mut q = p.clone();
            for f in &mut q.faces {
                f.label = Some(portraitforge::portrait::FiberLabel::Count(l.get(&f.id).unwrap()));
            }
            prop_assert!(validate(&q).is_empty());
            prop_assert!(propagate(&q).is_ok());
        }
    }

    #[test]
    fn fan_model_index_symmetry(n in 2u32..12, k in 0u32..10) {
        prop_assume!(k <= n - 2);
        let (p, q) = fan_fiber_model(n, k).unwrap();
        prop_assert_eq!(p + q, n);
        prop_assert_eq!(fan_fiber_model(n, n - 2 - k).unwrap(), (p, q));
    }

    #[test]
    fn unperturbed_twice_fold_is_rotation_invariant(
        x in prop::array::uniform2(-0.7f64..0.7),
        y in prop::array::uniform2(-0.7f64..0.7),
        s in 0.0f64..6.3,
        t in 0.0f64..6.3,
    ) {
        let m = TwiceFold::new(2, 2, 0.0).unwrap();
        let a = tf_eval(&m, &x, &y).unwrap();
        let b = tf_eval(&m, &apply(rotation(s), x), &apply(rotation(t), y)).unwrap();
        prop_assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    }

    #[test]
    fn printed_expressions_reparse(c in 0.1f64..5.0, k in 1u32..5, x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0) {
        let text = format!("{c} * sin(x*y)^{k} - exp(-z) / (1 + x^2) + sqrt(1 + y^2 + z^2)");
        let e = parse_expr(&text).unwrap();
        let again = parse_expr(&e.to_string()).unwrap();
        prop_assert_eq!(e.eval(x, y, z).unwrap(), again.eval(x, y, z).unwrap());
        for (d, d2) in e.grad().iter().zip(again.grad().iter()) {
            prop_assert_eq!(d.eval(x, y, z).unwrap(), d2.eval(x, y, z).unwrap());
        }
    }
}
