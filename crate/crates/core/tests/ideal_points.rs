use knotchar::boundary::restriction_map;
use knotchar::charvar::defining_polynomial;
use knotchar::ideal::{
    branch_expansions, ideal_points, projective_closure, tame_symbol, valuation, NormContext,
    DEFAULT_ORDER,
};
use knotchar::{KnotPresentation, MultiPoly, TraceEngine};
use num_complex::Complex64;
use num_integer::Integer;

fn fig8_context() -> NormContext {
    let engine = TraceEngine::new();
    let pres = KnotPresentation::builtin("fig8").unwrap();
    let curve = defining_polynomial(&engine, &pres, 1).unwrap();
    let triple = restriction_map(&engine, curve.nonabelian().unwrap(), &pres).unwrap();
    NormContext::new(&triple).unwrap()
}

#[test]
fn fig8_ideal_points_and_pole_orders() {
    let ctx = fig8_context();
    let mut names: Vec<&str> = ctx.data.iter().map(|d| d.point.as_str()).collect();
    names.sort();
    assert_eq!(names, ["[0:0:1]", "[1:0:0]"]);
    for d in &ctx.data {
        assert_eq!(d.v_mu, -1, "{d:?}");
        assert_eq!(d.v_lambda, -4, "{d:?}");
    }
    let n = |p, q| ctx.norm(p, q).unwrap().norm;
    assert_eq!(n(1, 0), 4);
    assert_eq!(n(0, 1), 16);
    assert_eq!(n(3, 1), 16);
    assert_eq!(n(-4, 1), 16);
}

#[test]
fn fig8_norm_formula_and_direct_valuations() {
    let ctx = fig8_context();
    for p in -10i64..=10 {
        for q in 0i64..=10 {
            if p.gcd(&q) != 1 || (q == 0 && p < 0) {
                continue;
            }
            let expected = 2 * ((p + 4 * q).abs() + (p - 4 * q).abs()) as u64;
            let rep = ctx.norm_with_direct(p, q).unwrap();
            assert_eq!(rep.norm, expected, "({p},{q})");
            let direct: u64 = rep
                .contributions
                .iter()
                .map(|c| c.direct.unwrap().min(0).unsigned_abs())
                .sum();
            assert_eq!(direct, expected, "direct ({p},{q}): {rep:?}");
        }
    }
}

#[test]
fn fig8_f_alpha_pole_is_two_at_both_points() {
    let engine = TraceEngine::new();
    let pres = KnotPresentation::builtin("fig8").unwrap();
    let curve = defining_polynomial(&engine, &pres, 1).unwrap();
    let pc = projective_closure(curve.nonabelian().unwrap()).unwrap();
    let pts = ideal_points(&pc).unwrap();
    assert_eq!(pts.len(), 2);
    let f_alpha = knotchar::algebra::parse_poly("x^2 - 4", &["x", "z"]).unwrap();
    for pt in &pts {
        let b = branch_expansions(&pc, pt, DEFAULT_ORDER).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].ramification, 1);
        assert_eq!(valuation(&pc, &b[0], &f_alpha, None).unwrap(), -2);
    }
}

#[test]
fn valuations_are_additive() {
    let engine = TraceEngine::new();
    let pres = KnotPresentation::builtin("fig8").unwrap();
    let curve = defining_polynomial(&engine, &pres, 1).unwrap();
    let pc = projective_closure(curve.nonabelian().unwrap()).unwrap();
    let vars = ["x", "z"];
    let fs: Vec<MultiPoly> = ["x - 3", "z + x", "x*z - 1", "z^2 + 2", "x^3 - z"]
        .iter()
        .map(|s| knotchar::algebra::parse_poly(s, &vars).unwrap())
        .collect();
    for pt in ideal_points(&pc).unwrap() {
        let b = &branch_expansions(&pc, &pt, 24).unwrap()[0];
        for f in &fs {
            for g in &fs {
                let vf = valuation(&pc, b, f, None).unwrap();
                let vg = valuation(&pc, b, g, None).unwrap();
                assert_eq!(valuation(&pc, b, &(f * g), None).unwrap(), vf + vg);
                if let Ok(vs) = valuation(&pc, b, &(f + g), None) {
                    assert!(vs >= vf.min(vg));
                }
                let tfg = tame_symbol(&pc, b, (f, None), (g, None)).unwrap();
                let tff = tame_symbol(&pc, b, (&(f * f), None), (g, None)).unwrap();
                assert!((tff - tfg * tfg).norm() < 1e-8 * (1.0 + tff.norm()));
            }
        }
    }
}

#[test]
fn fig8_branch_at_zero_zero_one_matches_hand_expansion() {
    // chart Z = 1: y = x^2 - x^4 + O(x^6) in the local coordinates
    let engine = TraceEngine::new();
    let pres = KnotPresentation::builtin("fig8").unwrap();
    let curve = defining_polynomial(&engine, &pres, 1).unwrap();
    let pc = projective_closure(curve.nonabelian().unwrap()).unwrap();
    let pt = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let b = &branch_expansions(&pc, &pt, 8).unwrap()[0];
    let terms = b.puiseux_terms();
    let coeff = |k: i64| terms.iter().find(|t| t.0 == k).map(|t| t.2).unwrap_or_default();
    assert!((coeff(2) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    assert!(coeff(3).norm() < 1e-12);
    assert!((coeff(4) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
}

mod norm_axioms {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn ctx() -> &'static NormContext {
        static CTX: OnceLock<NormContext> = OnceLock::new();
        CTX.get_or_init(fig8_context)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn homogeneous_and_subadditive(p in -12i64..=12, q in -12i64..=12, r in -12i64..=12, s in -12i64..=12, k in -3i64..=3) {
            prop_assume!((p, q) != (0, 0) && (r, s) != (0, 0) && (p + r, q + s) != (0, 0) && k != 0);
            let n = |a, b| ctx().norm(a, b).unwrap().norm;
            prop_assert!(n(p, q) > 0);
            prop_assert_eq!(n(k * p, k * q), k.unsigned_abs() * n(p, q));
            prop_assert!(n(p + r, q + s) <= n(p, q) + n(r, s));
        }
    }
}
