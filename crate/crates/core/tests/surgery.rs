use knotchar::boundary::restriction_map;
use knotchar::charvar::{defining_polynomial, reducible_characters};
use knotchar::ideal::NormContext;
use knotchar::surgery::{compare_with_norm, gamma_trace_on_component, SurgeryContext, SurgerySlope};
use knotchar::{KnotPresentation, TraceEngine};
use num_complex::Complex64;
use num_integer::Integer;

fn fig8() -> (SurgeryContext, NormContext) {
    let engine = TraceEngine::new();
    let pres = KnotPresentation::builtin("fig8").unwrap();
    let curve = defining_polynomial(&engine, &pres, 1).unwrap();
    let comp = curve.nonabelian().unwrap();
    let triple = restriction_map(&engine, comp, &pres).unwrap();
    let red = reducible_characters(comp, &pres.alexander).unwrap();
    (SurgeryContext::new(&triple, red).unwrap(), NormContext::new(&triple).unwrap())
}

fn assert_xs(got: Vec<Complex64>, want: &[f64]) {
    assert_eq!(got.len(), want.len(), "{got:?}");
    for (g, w) in got.iter().zip(want) {
        assert!((g - Complex64::new(*w, 0.0)).norm() < 1e-9, "{got:?} vs {want:?}");
    }
}

#[test]
fn gamma_traces() {
    let (ctx, _) = fig8();
    let g = |p, q| gamma_trace_on_component(SurgerySlope::new(p, q).unwrap(), &ctx.triple).unwrap().to_string();
    let vars = ["x", "z"];
    let parse = |s: &str| knotchar::algebra::parse_poly(s, &vars).unwrap().to_string();
    assert_eq!(g(1, 0), parse("x"));
    assert_eq!(g(0, 1), parse("x^4 - 5*x^2 + 2"));
    assert_eq!(
        g(3, 1),
        parse("(x^2-1)*((4*x-x^3)*z + x^5-4*x^3-x) - x*(x^4-5*x^2+2)")
    );
}

#[test]
fn three_one_surgery() {
    let (ctx, _) = fig8();
    let r = ctx.intersection_set(SurgerySlope::new(3, 1).unwrap(), 7).unwrap();
    let s2 = 2f64.sqrt();
    assert_xs(r.x_values(2), &[1.0 - s2, 1.0, 1.0 + s2]);
    let plus = r.eliminants.iter().find(|e| e.trace == 2).unwrap();
    let target = knotchar::algebra::parse_poly("x^2 - 2*x - 1", &["x"]).unwrap().normalized();
    assert!(plus.factors.iter().any(|(f, m)| *f == target && *m == 2), "{:?}", plus.factors);
    for e in r.chi_list.iter().filter(|e| !e.excluded) {
        assert!(e.lift_residual < 1e-7, "{e:?}");
    }
    for e in &r.chi_list {
        assert_eq!(e.branch_orders.iter().sum::<i64>(), e.multiplicity as i64, "{e:?}");
    }
}

#[test]
fn zero_one_surgery() {
    let (ctx, _) = fig8();
    let r = ctx.intersection_set(SurgerySlope::new(0, 1).unwrap(), 7).unwrap();
    let s5 = 5f64.sqrt();
    assert_xs(r.x_values(2), &[-s5, 0.0, s5]);
    for e in r.chi_list.iter().filter(|e| e.trace == 2 && !e.excluded) {
        let x = e.x.to_complex().re;
        assert_eq!(e.reducible, x.abs() > 1.0, "{e:?}");
        if e.reducible {
            assert!((e.z.to_complex() - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        }
    }
    assert!(r.chi_list.iter().any(|e| e.excluded));
}

#[test]
fn one_zero_surgery() {
    let (ctx, _) = fig8();
    let r = ctx.intersection_set(SurgerySlope::new(1, 0).unwrap(), 7).unwrap();
    assert_eq!(r.lambda, 0);
    assert!(r.b >= 1);
    assert!(r.chi_list.iter().all(|e| e.excluded));
}

#[test]
fn multiplicities_do_not_depend_on_the_shear() {
    let (ctx, _) = fig8();
    for (p, q) in [(3, 1), (0, 1), (1, 0), (-2, 3)] {
        let slope = SurgerySlope::new(p, q).unwrap();
        let base = ctx.intersection_set(slope, 0).unwrap();
        let key = |r: &knotchar::surgery::SurgeryReport| -> Vec<(i32, String, u32)> {
            r.chi_list
                .iter()
                .map(|e| (e.trace, format!("{:.8}", e.x.to_complex()), e.multiplicity))
                .collect()
        };
        for seed in 1..5 {
            let r = ctx.intersection_set(slope, seed).unwrap();
            assert_eq!(key(&r), key(&base), "({p},{q}) seed {seed}");
        }
        let neg = ctx.intersection_set(SurgerySlope::new(-p, -q).unwrap(), 0).unwrap();
        assert_eq!(key(&neg), key(&base));
    }
}

#[test]
fn norm_comparison_small_slopes() {
    let (ctx, norms) = fig8();
    for p in -5i64..=5 {
        for q in 0i64..=5 {
            if p.gcd(&q) != 1 || (q == 0 && p < 0) {
                continue;
            }
            let r = ctx.intersection_set(SurgerySlope::new(p, q).unwrap(), 3).unwrap();
            let n = norms.norm_with_direct(p, q).unwrap();
            let c = compare_with_norm(&r, &n);
            assert!(c.lambda_le_b);
            assert_eq!(c.degree_balance, Some(true), "{c:?}");
            assert_eq!(c.b as i64 + c.hat_i.unwrap(), c.norm as i64, "{c:?}");
            assert_eq!(c.lambda_plus_hat_i_le_norm, Some(true), "{c:?}");
            // I_gamma -+ 2 is a square on the eigenvalue cover away from x = +-2
            for e in r.chi_list.iter().filter(|e| !e.excluded) {
                assert_eq!(e.multiplicity % 2, 0, "({p},{q}) {e:?}");
            }
        }
    }
}
