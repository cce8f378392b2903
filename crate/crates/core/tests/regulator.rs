use std::f64::consts::{PI, TAU};

use knotchar::boundary::{a_polynomial, restriction_map};
use knotchar::charvar::defining_polynomial;
use knotchar::error::Error;
use knotchar::ideal::{branch_expansions, projective_closure, tame_symbol};
use knotchar::regulator::{
    base_point, close_circle, detect_rational, holonomy, integrate_forms, loop_library, track_path, vol_cs,
    CurveFunction, NumCurve, PathSpec, Piece,
};
use knotchar::{KnotPresentation, MultiPoly, TraceEngine};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

const VOL_FIG8: f64 = 2.029883212819307;

fn fig8_a() -> MultiPoly {
    let engine = TraceEngine::new();
    let pres = KnotPresentation::builtin("fig8").unwrap();
    let curve = defining_polynomial(&engine, &pres, 1).unwrap();
    let triple = restriction_map(&engine, curve.nonabelian().unwrap(), &pres).unwrap();
    a_polynomial(&triple).unwrap().poly
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn root_near(nc: &NumCurve, m: Complex64, hint: Complex64) -> Complex64 {
    *nc.fiber_roots(m)
        .unwrap()
        .iter()
        .min_by(|a, b| (*a - hint).norm().total_cmp(&(*b - hint).norm()))
        .unwrap()
}

#[test]
fn constant_driver_gives_constant_samples() {
    let a = fig8_a();
    let nc = NumCurve::new(&a).unwrap();
    let m0 = c(1.3, 0.0);
    let l0 = root_near(&nc, m0, c(0.0, 1.0));
    let spec = PathSpec::new(vec![Piece::Segment { from: m0, to: m0 }], [m0, l0], 16);
    let path = track_path(&a, &spec).unwrap();
    assert!(path.samples().all(|s| s.m == m0 && (s.l - l0).norm() < 1e-14));
    let f = integrate_forms(&path);
    assert_eq!((f.eta, f.xi), (0.0, 0.0));
}

#[test]
fn driver_through_a_branch_point_is_rejected() {
    let a = fig8_a();
    let nc = NumCurve::new(&a).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let m0 = c(1.4, 0.0);
    let l0 = nc.fiber_roots(m0).unwrap()[0];
    let spec = PathSpec::new(vec![Piece::Segment { from: m0, to: c(2.0 * phi - 1.4, 0.0) }], [m0, l0], 64);
    match track_path(&a, &spec) {
        Err(Error::NearBranchPoint { t, .. }) => assert!((t - 0.5).abs() < 0.01, "t = {t}"),
        other => panic!("expected a branch point error, got {other:?}"),
    }
}

#[test]
fn closed_path_through_the_base_point() {
    let a = fig8_a();
    let nc = NumCurve::new(&a).unwrap();
    let base = base_point(&nc, c(-1.0, 0.0)).unwrap();
    assert!((base.point[1] + 1.0).norm() < 1e-12);
    let pieces = vec![
        Piece::Segment { from: c(1.0, 0.0), to: c(1.1, 0.0) },
        Piece::Arc { center: c(1.0, 0.0), radius: 0.1, start: 0.0, turns: 1.0 },
        Piece::Segment { from: c(1.1, 0.0), to: c(1.0, 0.0) },
    ];
    let path = track_path(&a, &base.spec(pieces, 512)).unwrap();
    assert!((path.last().l - path.first().l).norm() < 1e-8, "{:?}", path.last());
    let (vol, cs) = vol_cs(&path, VOL_FIG8, 0.0).unwrap();
    assert!((vol - VOL_FIG8).abs() < 1e-6, "{vol}");
    let f = integrate_forms(&path);
    assert!(f.eta.abs() < 1e-6);
    assert!(detect_rational(f.xi / (4.0 * PI * PI), 64, 1e-6).is_some(), "{cs}");
}

#[test]
fn volume_decreases_along_real_m() {
    let a = fig8_a();
    let nc = NumCurve::new(&a).unwrap();
    let base = base_point(&nc, c(-1.0, 0.0)).unwrap();
    let end = 0.1f64.exp();
    let path = track_path(&a, &base.spec(vec![Piece::Segment { from: c(1.0, 0.0), to: c(end, 0.0) }], 512)).unwrap();
    let (vol, cs) = vol_cs(&path, VOL_FIG8, 0.0).unwrap();
    assert!(vol < VOL_FIG8);
    // on the real axis |l| = 1, so CS stays put
    assert!(cs.abs() < 1e-9, "{cs}");

    // oracle: closed-form l on the unit circle, trapezoid in log m
    let n = 4000;
    let l_of = |m: f64| {
        let p = m.powi(8) - m.powi(6) - 2.0 * m.powi(4) - m * m + 1.0;
        let d = (p * p - 4.0 * m.powi(8)).min(0.0);
        c(p, (-d).sqrt()) / (2.0 * m.powi(4))
    };
    let mut arg_prev = PI;
    let mut acc = 0.0;
    let mut prev_u = 0.0f64;
    for k in 1..=n {
        let u = 0.1 * k as f64 / n as f64;
        let l = l_of(u.exp());
        let mut arg = l.arg();
        while arg - arg_prev > PI {
            arg -= TAU;
        }
        while arg - arg_prev < -PI {
            arg += TAU;
        }
        acc += 0.5 * (prev_u + u) * (arg - arg_prev);
        arg_prev = arg;
        prev_u = u;
    }
    let oracle = VOL_FIG8 + 2.0 * acc;
    assert!((vol - oracle).abs() < 1e-6, "{vol} vs {oracle}");
}

#[test]
fn reversal_and_concatenation() {
    let a = fig8_a();
    let nc = NumCurve::new(&a).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let (center, radius) = (c(0.0, 0.0), 1.3);
    let m0 = c(radius, 0.0);
    let l0 = nc.fiber_roots(m0).unwrap()[0];
    let whole = track_path(&a, &PathSpec::new(vec![Piece::Arc { center, radius, start: 0.0, turns: 1.0 }], [m0, l0], 1024))
        .unwrap();
    let fw = integrate_forms(&whole);
    let fr = integrate_forms(&whole.reversed());
    assert!((fw.eta + fr.eta).abs() < 1e-12 && (fw.xi + fr.xi).abs() < 1e-12);
    for _ in 0..3 {
        let s: f64 = rng.gen_range(0.1..0.9);
        let first = track_path(&a, &PathSpec::new(vec![Piece::Arc { center, radius, start: 0.0, turns: s }], [m0, l0], 1024))
            .unwrap();
        let mid = first.last();
        let second = track_path(
            &a,
            &PathSpec::new(vec![Piece::Arc { center, radius, start: s, turns: 1.0 - s }], [mid.m, mid.l], 1024),
        )
        .unwrap();
        let joined = first.concat(&second).unwrap();
        let (f1, f2, fj) = (integrate_forms(&first), integrate_forms(&second), integrate_forms(&joined));
        assert!((fj.eta - fw.eta).abs() < 1e-8, "{} vs {}", fj.eta, fw.eta);
        assert!((fj.xi - fw.xi).abs() < 1e-8, "{} vs {}", fj.xi, fw.xi);
        assert!((f1.eta + f2.eta - fj.eta).abs() < 1e-12);
    }
}

#[test]
fn library_loops_are_exact_and_quantized() {
    let a = fig8_a();
    let nc = NumCurve::new(&a).unwrap();
    let loops = loop_library(&a, 6, 512).unwrap();
    assert!(loops.len() >= 4, "{loops:?}");
    for lp in &loops {
        let mut detected = Vec::new();
        for factor in [1, 2, 4] {
            let path = knotchar::regulator::track::track_numeric(&nc, &lp.path_spec(512 * factor)).unwrap();
            assert!(path.is_closed(1e-8), "{}", lp.describe());
            let f = integrate_forms(&path);
            assert!(f.eta.abs() < 1e-6, "{}: eta {}", lp.describe(), f.eta);
            let hol = f.holonomy.unwrap();
            assert!((hol.norm() - 1.0).abs() < 1e-8, "{hol}");
            detected.push(detect_rational(f.xi / (4.0 * PI * PI), 64, 1e-6));
        }
        assert!(detected[0].is_some(), "{}: {detected:?}", lp.describe());
        assert!(detected.iter().all(|d| *d == detected[0]), "{detected:?}");
    }
}

#[test]
fn detect_rational_examples() {
    assert_eq!(detect_rational(0.24999999, 64, 1e-6), Some((1, 4)));
    assert_eq!(detect_rational(0.0, 64, 1e-6), Some((0, 1)));
    assert_eq!(detect_rational(PI / 10.0, 8, 1e-6), None);
    assert_eq!(detect_rational(-2.0000000001, 64, 1e-6), Some((-2, 1)));
}

fn loop_around(nc: &NumCurve, center: Complex64, radius: f64, l_hint: Complex64) -> knotchar::regulator::CurvePath {
    let m0 = center + radius;
    let l0 = root_near(nc, m0, l_hint);
    close_circle(nc, center, radius, 0.0, l0, 1024, 4).unwrap().1
}

#[test]
fn holonomy_identities() {
    let a = fig8_a();
    let nc = NumCurve::new(&a).unwrap();
    let loops: Vec<_> = [(c(0.0, 0.0), 0.3), (c(0.0, 0.0), 1.3), (c(1.618033988749895, 0.0), 0.25)]
        .iter()
        .map(|&(ctr, r)| loop_around(&nc, ctr, r, c(0.0, 0.0)))
        .collect();
    let one = CurveFunction::parse("1").unwrap();
    let l = CurveFunction::parse("l").unwrap();
    let m = CurveFunction::parse("m").unwrap();
    let g = CurveFunction::parse("m - 2 / m^2 + 1").unwrap();
    for path in &loops {
        assert!((holonomy(&one, &l, path).unwrap() - 1.0).norm() < 1e-12);
        let a1 = holonomy(&l, &g, path).unwrap();
        let a2 = holonomy(&g, &l, path).unwrap();
        assert!((a1 * a2 - 1.0).norm() < 1e-8, "{a1} {a2}");
        let lm = l.product(&m).unwrap();
        let prod = holonomy(&l, &g, path).unwrap() * holonomy(&m, &g, path).unwrap();
        assert!((holonomy(&lm, &g, path).unwrap() - prod).norm() < 1e-7);
    }
    for f in ["m", "l*m^2 / m^4 + 1", "m^2 + l / 3"] {
        let f = CurveFunction::parse(f).unwrap();
        let g = f.one_minus().unwrap();
        for path in &loops {
            let h = holonomy(&f, &g, path).unwrap();
            assert!((h - 1.0).norm() < 1e-6, "Steinberg: {h}");
        }
    }
}

#[test]
fn holonomy_does_not_depend_on_the_base_point() {
    let a = fig8_a();
    let nc = NumCurve::new(&a).unwrap();
    let l = CurveFunction::parse("l").unwrap();
    let g = CurveFunction::parse("m - 2").unwrap();
    let base = loop_around(&nc, c(0.0, 0.0), 1.3, c(0.0, 0.0));
    let h0 = holonomy(&l, &g, &base).unwrap();
    for start in [0.125, 0.4, 0.77] {
        let m0 = Complex64::from_polar(1.3, TAU * start);
        // follow the base loop to the new start so the sheet is the same
        let s = base.samples().min_by(|a, b| (a.m - m0).norm().total_cmp(&(b.m - m0).norm())).unwrap();
        let l0 = root_near(&nc, m0, s.l);
        let (_, path) = close_circle(&nc, c(0.0, 0.0), 1.3, start, l0, 1024, 4).unwrap();
        let h = holonomy(&l, &g, &path).unwrap();
        assert!((h - h0).norm() < 1e-7, "{h} vs {h0}");
    }
}

#[test]
fn small_loops_give_tame_symbols() {
    let a = fig8_a();
    let nc = NumCurve::new(&a).unwrap();
    let pc = projective_closure(&a).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    // (f, g, centre, radius, polynomial in m vanishing at the centre)
    let cases: Vec<(&str, &str, Complex64, f64, &str)> = vec![
        ("l", "m - 2", c(2.0, 0.0), 0.1, "m - 2"),
        ("m - 2", "l", c(2.0, 0.0), 0.1, "m - 2"),
        ("l", "m - 2", c(0.0, 0.0), 0.3, "m"),
        ("l", "m", c(0.0, 0.0), 0.3, "m"),
        ("l", "m^2 - m - 1", c(phi, 0.0), 0.1, "m^2 - m - 1"),
    ];
    for (fs, gs, center, radius, locator) in cases {
        let (f, g) = (CurveFunction::parse(fs).unwrap(), CurveFunction::parse(gs).unwrap());
        let m0 = center + radius;
        for l0 in nc.fiber_roots(m0).unwrap() {
            let (_, path) = close_circle(&nc, center, radius, 0.0, l0, 2048, 4).unwrap();
            let hol = holonomy(&f, &g, &path).unwrap();
            // the loop encircles the point of the curve its fiber root tends to
            let m_c = center;
            let l_c = if m_c.norm() == 0.0 {
                if l0.norm() > 1.0 { None } else { Some(c(0.0, 0.0)) }
            } else {
                Some(nc.fiber_point(m_c, path.first().l).unwrap().0)
            };
            let point = match l_c {
                Some(lc) => [m_c, c(1.0, 0.0), lc],
                None => [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            };
            // several branches may pass through the point; take the one with m -> center
            let shifted = CurveFunction::parse(locator).unwrap().num;
            let branch = branch_expansions(&pc, &point, 16)
                .unwrap()
                .into_iter()
                .find(|b| knotchar::ideal::valuation(&pc, b, &shifted, None).map_or(false, |v| v > 0))
                .unwrap();
            let t = tame_symbol(&pc, &branch, (&f.num, f.den.as_ref()), (&g.num, g.den.as_ref())).unwrap();
            assert!((hol - t).norm() < 1e-6 * (1.0 + t.norm()), "{fs}, {gs} at {point:?}: {hol} vs {t}");
        }
    }
}
