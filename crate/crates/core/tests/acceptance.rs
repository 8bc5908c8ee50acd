//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use portraitforge::analysis::{
    enumerate_labelings, levine_morse_data, propagate, stratified_chi, thom_parity, Labeling, ThomVerdict,
    DEFAULT_ENUMERATION_CAP,
};
use portraitforge::constructors::{
    genus_surface_portrait, morse_lift, projective_plane_portrait, sphere_bundle_portrait, toric_portrait,
    ConstructError, Field,
};
use portraitforge::expr::parse_expr;
use portraitforge::local_models::{tf_map_spec, tf_singular_set, TwiceFold};
use portraitforge::numeric::{extract_portrait, parse_map_spec, Extraction, MapSpec};
use portraitforge::portrait::{parse_portrait, validate, FiberLabel, Point, Portrait};

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn map(name: &str) -> MapSpec {
    parse_map_spec(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn portrait(name: &str) -> Portrait {
    parse_portrait(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn extract(spec: &MapSpec) -> Result<Extraction, String> {
    extract_portrait(spec).map_err(|e| e.to_string())
}

fn seg_dist(q: Point, a: Point, b: Point) -> f64 {
    let d = b.sub(a);
    let t = if d.dot(d) == 0.0 {
        0.0
    } else {
        (q.sub(a).dot(d) / d.dot(d)).clamp(0.0, 1.0)
    };
    q.dist(a.add(d.scale(t)))
}

/// Hausdorff distance between a closed polyline and the circle of radius
/// `r` about the origin.
fn hausdorff_to_circle(pts: &[Point], r: f64) -> f64 {
    let n = pts.len();
    let mut h: f64 = 0.0;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        // Farthest point of a chord from the circle is an end or the middle.
        for q in [a, b, a.add(b).scale(0.5)] {
            h = h.max((q.norm() - r).abs());
        }
    }
    for k in 0..3600 {
        let t = 2.0 * std::f64::consts::PI * k as f64 / 3600.0;
        let c = Point::new(r * t.cos(), r * t.sin());
        let d = (0..n)
            .map(|i| seg_dist(c, pts[i], pts[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min);
        h = h.max(d);
    }
    h
}

fn face_values(p: &Portrait) -> BTreeSet<i64> {
    p.faces.iter().filter_map(|f| f.label.map(FiberLabel::value)).collect()
}

fn chi_and_parity(p: &Portrait) -> Result<(i64, ThomVerdict), String> {
    let chi = stratified_chi(p, None).map_err(|e| e.to_string())?;
    Ok((chi, thom_parity(p, chi)))
}

fn criterion_1() -> Outcome {
    let ex = extract(&map("sphere.map"))?;
    let p = &ex.portrait;
    ensure(
        p.circles.len() == 1 && p.arcs.is_empty(),
        format!("{} circles, {} arcs", p.circles.len(), p.arcs.len()),
    )?;
    let h = hausdorff_to_circle(p.circles[0].points.as_ref().unwrap(), 1.0);
    ensure(h < 1e-3, format!("Hausdorff distance {h:e}"))?;
    ensure(ex.cusp_count() == 0, format!("CUSPS={}", ex.cusp_count()))?;
    ensure(
        face_values(p) == BTreeSet::from([0, 2]),
        format!("faces {:?}", face_values(p)),
    )?;
    let (chi, thom) = chi_and_parity(p)?;
    ensure(
        chi == 2 && thom == ThomVerdict::Pass,
        format!("CHI={chi} THOM={}", thom.as_str()),
    )?;
    Ok(format!("Hausdorff {h:.2e}, CUSPS=0, faces {{0,2}}, CHI=2, THOM=pass"))
}

fn criterion_2() -> Outcome {
    let ex = extract(&map("torus.map"))?;
    let p = &ex.portrait;
    ensure(p.circles.len() == 2, format!("{} circles", p.circles.len()))?;
    let mut dists = Vec::new();
    for r in [1.0, 3.0] {
        let h = p
            .circles
            .iter()
            .map(|c| hausdorff_to_circle(c.points.as_ref().unwrap(), r))
            .fold(f64::INFINITY, f64::min);
        ensure(h < 1e-3, format!("radius {r}: Hausdorff distance {h:e}"))?;
        dists.push(h);
    }
    let (chi, thom) = chi_and_parity(p)?;
    ensure(
        chi == 0 && thom == ThomVerdict::Pass,
        format!("CHI={chi} THOM={}", thom.as_str()),
    )?;
    Ok(format!(
        "radii 1, 3 within {:.2e}, {:.2e}; CHI=0, THOM=pass",
        dists[0], dists[1]
    ))
}

fn criterion_3() -> Outcome {
    let spec = map("tilted-torus.map");
    let ex = extract(&spec)?;
    let mut fine = spec.clone();
    fine.tol.step = spec.tol.step / 2.0;
    let ex_fine = extract(&fine)?;
    let (c0, c1) = (ex.cusp_count(), ex_fine.cusp_count());
    ensure(
        c0 == 4 && c1 == 4,
        format!("CUSPS={c0} at step {}, {c1} at step {}", spec.tol.step, fine.tol.step),
    )?;
    for e in [&ex, &ex_fine] {
        let (chi, thom) = chi_and_parity(&e.portrait)?;
        ensure(chi == 0, format!("CHI={chi}"))?;
        ensure(
            (e.cusp_count() as i64 - chi) % 2 == 0 && thom == ThomVerdict::Pass,
            format!("parity {} vs {chi}", e.cusp_count()),
        )?;
    }
    Ok("CUSPS=4 at step and half step, CHI=0, 4 = 0 mod 2".into())
}

fn criterion_4() -> Outcome {
    let m = TwiceFold::new(1, 1, 0.2).map_err(|e| e.to_string())?;
    let ex = extract(&tf_map_spec(&m).map_err(|e| e.to_string())?)?;
    ensure(ex.cusp_count() == 1, format!("CUSPS={}", ex.cusp_count()))?;
    let c = ex.cusps.iter().flatten().next().unwrap();
    let src = ((c.point[0] - 0.1).abs()).max((c.point[1] - 0.1).abs());
    let img = ((c.image[0] - 0.03).abs()).max((c.image[1] - 0.03).abs());
    ensure(src < 1e-4, format!("source {:?} off by {src:e}", c.point))?;
    ensure(img < 1e-4, format!("image {:?} off by {img:e}", c.image))?;
    let flat = TwiceFold::new(1, 1, 0.0).map_err(|e| e.to_string())?;
    let crossing = tf_singular_set(&flat, 64).map_err(|e| e.to_string())?.self_crossing;
    let perturbed = tf_singular_set(&m, 64).map_err(|e| e.to_string())?.self_crossing;
    ensure(
        crossing && !perturbed,
        format!("self-crossing eps=0: {crossing}, eps=0.2: {perturbed}"),
    )?;
    Ok(format!(
        "1 cusp, source error {src:.1e}, image error {img:.1e}; eps=0 locus self-crosses"
    ))
}

fn criterion_5() -> Outcome {
    for g in 0..=4 {
        let chi = stratified_chi(&genus_surface_portrait(g), None).map_err(|e| e.to_string())?;
        ensure(chi == 2 - 2 * g as i64, format!("genus {g}: CHI={chi}"))?;
    }
    Ok("genus 0..4 give 2, 0, -2, -4, -6".into())
}

fn criterion_6() -> Outcome {
    for (poly, k) in [
        (vec![(0, 0), (1, 0), (0, 1)], 3),
        (vec![(0, 0), (1, 0), (1, 1), (0, 1)], 4),
    ] {
        let p = toric_portrait(&poly).map_err(|e| e.to_string())?;
        let chi = stratified_chi(&p, None).map_err(|e| e.to_string())?;
        ensure(
            p.cusp_count() == k && chi == k as i64,
            format!("{poly:?}: CUSPS={} CHI={chi}", p.cusp_count()),
        )?;
    }
    let err = toric_portrait(&[(0, 0), (2, 0), (0, 1)]).unwrap_err();
    ensure(
        matches!(err, ConstructError::Delzant { vertex: (0, 1), .. }),
        format!("got {err}"),
    )?;
    ensure(err.to_string().contains("(0, 1)"), "vertex not named in message")?;
    Ok(format!("triangle 3/3, square 4/4, rejected: {err}"))
}

fn step(circles: usize, k: u8) -> Option<usize> {
    match (k, circles) {
        (0, c) => Some(c + 1),
        (1, 0) | (2, 0) => None,
        (1, 1) => Some(2),
        (1, c) | (2, c) => Some(c - 1),
        _ => None,
    }
}

/// Whether `circles` open level circles can all be closed in exactly
/// `left` further critical points.
fn closable(circles: usize, left: usize) -> bool {
    if left == 0 {
        return circles == 0;
    }
    (0..3).any(|k| step(circles, k).is_some_and(|c| closable(c, left - 1)))
}

/// Random valid critical sequence of length at most 12. Every critical
/// point changes the number of level circles by one, so lengths are even.
fn random_sequence(rng: &mut ChaCha8Rng) -> Vec<(f64, u8)> {
    let len = 2 * rng.gen_range(1..=6);
    let mut out = Vec::with_capacity(len);
    let mut circles = 0usize;
    let mut v: f64 = rng.gen_range(-5.0..5.0);
    for i in 0..len {
        let left = len - i - 1;
        let options: Vec<u8> = (0..3)
            .filter(|&k| step(circles, k).is_some_and(|c| closable(c, left)))
            .collect();
        let k = options[rng.gen_range(0..options.len())];
        circles = step(circles, k).expect("filtered");
        out.push((v, k));
        v += rng.gen_range(0.05..2.0);
    }
    out
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for n in 0..200 {
        let s = random_sequence(&mut rng);
        let p = morse_lift(&s).map_err(|e| format!("sequence {n} {s:?}: {e}"))?;
        let l = Labeling::from_portrait(&p).ok_or("lift is unlabeled")?;
        let data = levine_morse_data(&p, &l, 0.0).map_err(|e| format!("sequence {n}: {e}"))?;
        let got: Vec<(f64, u8)> = data.iter().map(|d| (d.value, d.index)).collect();
        ensure(got == s, format!("sequence {n}: {s:?} came back as {got:?}"))?;
        let sum: i64 = s.iter().map(|&(_, k)| if k == 1 { -1 } else { 1 }).sum();
        let chi = stratified_chi(&p, None).map_err(|e| e.to_string())?;
        ensure(sum == chi, format!("sequence {n}: alternating sum {sum}, CHI={chi}"))?;
    }
    Ok("200 random sequences round-trip exactly".into())
}

fn surface_fixtures() -> Vec<(String, Portrait)> {
    let mut out: Vec<(String, Portrait)> = [
        "sphere.portrait",
        "genus-2.portrait",
        "nested-circles.portrait",
        "rp2.portrait",
        "morse-torus.portrait",
        "tilted-torus.portrait",
    ]
    .iter()
    .map(|n| (n.to_string(), portrait(n)))
    .collect();
    for g in [1, 3, 4] {
        out.push((format!("genus {g}"), genus_surface_portrait(g)));
    }
    for m in ["sphere.map", "torus.map", "tilted-torus.map"] {
        out.push((m.to_string(), extract_portrait(&map(m)).unwrap().portrait));
    }
    let s = [(0.0, 0), (0.25, 0), (0.5, 1), (1.0, 1), (1.5, 2), (2.0, 2)];
    out.push(("morse lift".into(), morse_lift(&s).unwrap()));
    out
}

/// All even labelings with counts in `[0, cap]`, unbounded face 0, and a
/// change of exactly 2 across every contour element.
fn brute_force(p: &Portrait, cap: i64) -> BTreeSet<Vec<(String, i64)>> {
    let ids: Vec<&str> = p.faces.iter().map(|f| f.id.as_str()).collect();
    let outer = p.faces.iter().position(|f| f.unbounded).unwrap();
    let sides: Vec<(usize, usize)> = p
        .arcs
        .iter()
        .map(|a| (a.left.as_str(), a.right.as_str()))
        .chain(p.circles.iter().map(|c| (c.left.as_str(), c.right.as_str())))
        .map(|(l, r)| {
            (
                ids.iter().position(|&f| f == l).unwrap(),
                ids.iter().position(|&f| f == r).unwrap(),
            )
        })
        .collect();
    let n = ids.len();
    let levels = (cap / 2 + 1) as usize;
    let mut out = BTreeSet::new();
    let mut values = vec![0i64; n];
    let total = levels.pow(n as u32 - 1);
    for code in 0..total {
        let mut c = code;
        for (i, v) in values.iter_mut().enumerate() {
            if i == outer {
                *v = 0;
            } else {
                *v = 2 * (c % levels) as i64;
                c /= levels;
            }
        }
        if sides.iter().all(|&(l, r)| (values[l] - values[r]).abs() == 2) {
            let mut l: Vec<(String, i64)> = ids.iter().map(|s| s.to_string()).zip(values.iter().copied()).collect();
            l.sort();
            out.insert(l);
        }
    }
    out
}

/// Closed surfaces plus the local twice-fold portrait, which has boundary.
fn labeled_fixtures() -> Vec<(String, Portrait)> {
    let mut out = surface_fixtures();
    out.push(("tf.map".into(), extract_portrait(&map("tf.map")).unwrap().portrait));
    out
}

fn criterion_8() -> Outcome {
    let mut checked = 0;
    for (name, p) in labeled_fixtures() {
        if p.faces.len() > 6 {
            continue;
        }
        let cap = 2 * p.faces.len();
        let e = enumerate_labelings(&p, DEFAULT_ENUMERATION_CAP).map_err(|e| format!("{name}: {e}"))?;
        ensure(!e.overflow, format!("{name}: enumeration overflowed"))?;
        let got: BTreeSet<Vec<(String, i64)>> = e
            .labelings
            .iter()
            .map(|l| {
                let mut v: Vec<(String, i64)> = l.counts.iter().map(|(k, v)| (k.clone(), *v)).collect();
                v.sort();
                v
            })
            .collect();
        ensure(got.len() == e.labelings.len(), format!("{name}: duplicate labelings"))?;
        let want = brute_force(&p, cap as i64);
        ensure(
            got == want,
            format!("{name}: enumerated {} labelings, brute force {}", got.len(), want.len()),
        )?;
        checked += 1;
    }
    Ok(format!("{checked} portraits match brute force"))
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    for (name, p) in surface_fixtures() {
        let l = propagate(&p).map_err(|e| format!("{name}: {e}"))?;
        let chi = stratified_chi(&p, Some(&l)).map_err(|e| format!("{name}: {e}"))?;
        for k in 0..8 {
            let theta = 0.3 + 0.77 * k as f64;
            let data = levine_morse_data(&p, &l, theta).map_err(|e| format!("{name}, theta {theta}: {e}"))?;
            let sum: i64 = data.iter().map(|d| if d.index == 1 { -1 } else { 1 }).sum();
            ensure(sum == chi, format!("{name}, theta {theta}: Morse sum {sum}, CHI={chi}"))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} fixtures x 8 directions"))
}

fn criterion_10() -> Outcome {
    let mut all: Vec<(String, Portrait)> = labeled_fixtures();
    for n in [
        "cp2.portrait",
        "hp2.portrait",
        "square.portrait",
        "s2-bundle-s2.portrait",
    ] {
        all.push((n.to_string(), portrait(n)));
    }
    for (p, q) in [(1, 2), (2, 3), (3, 3)] {
        all.push((format!("bundle {p} {q}"), sphere_bundle_portrait(p, q).unwrap()));
    }
    for f in [Field::Real, Field::Complex, Field::Quaternion] {
        all.push((format!("projective {f}"), projective_plane_portrait(f)));
    }
    for (name, p) in &all {
        ensure(validate(p).is_empty(), format!("{name}: {:?}", validate(p)))?;
        let faces: i64 = p.faces_chi_c().values().sum();
        let total = faces - p.arcs.len() as i64 + p.vertices.len() as i64;
        ensure(total == 1, format!("{name}: sum is {total}"))?;
    }
    Ok(format!("{} portraits sum to 1", all.len()))
}

fn criterion_11() -> Outcome {
    let exprs = [
        "x^2 + y^2 + z^2 - 1",
        "(sqrt(x^2 + y^2) - 2)^2 + z^2 - 1",
        "y*sin(0.5) + z*cos(0.5)",
        "x^2 + 0.2*y",
        "exp(-x*y) * cos(3*z) - x/(2 + y^2)",
        "sin(x)*cos(y) + z^3 - 2*x*y*z",
        "(x - y)^3 / (1 + z^2) + sqrt(2 + x^2)",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for text in exprs {
        let e = parse_expr(text).map_err(|e| format!("{text}: {e}"))?;
        let g = e.grad();
        let mut n = 0;
        while n < 100 {
            let p = [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ];
            let f = |q: [f64; 3]| e.eval_at(&q).unwrap();
            for k in 0..3 {
                let exact = g[k].eval_at(&p).map_err(|e| e.to_string())?;
                // Richardson-extrapolated central difference.
                let fd = |h: f64| {
                    let (mut a, mut b) = (p, p);
                    a[k] += h;
                    b[k] -= h;
                    (f(a) - f(b)) / (2.0 * h)
                };
                let (d1, d2) = (fd(1e-3), fd(5e-4));
                let approx = d2 + (d2 - d1) / 3.0;
                let rel = (exact - approx).abs() / exact.abs().max(1e-300);
                if exact.abs() < 1e-3 {
                    continue;
                }
                ensure(
                    rel < 1e-6,
                    format!("{text} at {p:?}, d/d{}: exact {exact}, fd {approx}", ["x", "y", "z"][k]),
                )?;
                worst = worst.max(rel);
            }
            n += 1;
        }
    }
    Ok(format!(
        "{} expressions x 100 points, worst relative error {worst:.1e}",
        exprs.len()
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("sphere contour", criterion_1),
        ("torus contours", criterion_2),
        ("tilted torus cusps", criterion_3),
        ("perturbed twice fold", criterion_4),
        ("genus surfaces", criterion_5),
        ("toric surfaces", criterion_6),
        ("Morse lift round trip", criterion_7),
        ("enumeration completeness", criterion_8),
        ("Morse sums", criterion_9),
        ("stratification identity", criterion_10),
        ("gradient check", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
