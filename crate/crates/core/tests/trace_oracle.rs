use knotchar::matrix::eval_word;
use knotchar::trace::{peripheral_trace, TraceEngine};
use knotchar::{GroupWord, Mat2};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sl2(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let mut e = || Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let m = Mat2::new(e(), e(), e(), e());
        let d = m.det();
        if d.norm() > 0.2 {
            let s = d.sqrt().inv();
            let r = m.0;
            return Mat2::new(r[0][0] * s, r[0][1] * s, r[1][0] * s, r[1][1] * s);
        }
    }
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> GroupWord {
    let len = rng.gen_range(0..=max_len);
    GroupWord::from_syllables((0..len).map(|_| (rng.gen_range(0..2u8), if rng.gen() { 1 } else { -1 })))
}

#[test]
fn trace_polynomials_match_matrix_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(20261016);
    let engine = TraceEngine::new();
    let mut checked = 0;
    for _ in 0..500 {
        let a = random_sl2(&mut rng);
        let b = random_sl2(&mut rng);
        let point = [a.trace(), b.trace(), (a * b).trace()];
        for _ in 0..4 {
            let w = random_word(&mut rng, 12);
            let p = engine.trace_poly(&w).unwrap();
            let exact = eval_word(&w, &[a, b]).trace();
            let got = p.eval_complex(&point);
            let scale = 1.0 + p.eval_abs_scale(&point) * 1e-14;
            assert!(
                (got - exact).norm() < 1e-8 * scale,
                "word {w}: poly {got}, matrix {exact}"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 2000);
}

#[test]
fn commutator_trace_identity() {
    let p = TraceEngine::new()
        .trace_poly(&GroupWord::parse("abAB").unwrap())
        .unwrap();
    let expected =
        knotchar::algebra::parse_poly("x^2 + y^2 + z^2 - x*y*z - 2", &["x", "y", "z"]).unwrap();
    assert_eq!(p, expected);
}

#[test]
fn peripheral_trace_on_the_boundary_torus() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let m = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.28));
        let l = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.28));
        let pt = [m + m.inv(), l + l.inv(), m * l + (m * l).inv()];
        for p in -6i32..=6 {
            for q in -6i32..=6 {
                if p == 0 && q == 0 {
                    continue;
                }
                let t = peripheral_trace(p, q).unwrap().eval_complex(&pt);
                let mono = m.powi(p) * l.powi(q);
                let exact = mono + mono.inv();
                let scale = 1.0 + exact.norm();
                assert!((t - exact).norm() < 1e-9 * scale, "p={p} q={q}");
            }
        }
    }
}

fn word_strategy(max: usize) -> impl Strategy<Value = GroupWord> {
    prop::collection::vec((0u8..2, prop_oneof![Just(1i32), Just(-1i32)]), 0..=max)
        .prop_map(GroupWord::from_syllables)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_invariance(u in word_strategy(6), w in word_strategy(6)) {
        let e = TraceEngine::new();
        let conj = u.concat(&w).concat(&u.inverse());
        prop_assert_eq!(e.trace_poly(&conj).unwrap(), e.trace_poly(&w).unwrap());
    }

    #[test]
    fn inversion_invariance(w in word_strategy(10)) {
        let e = TraceEngine::new();
        prop_assert_eq!(e.trace_poly(&w.inverse()).unwrap(), e.trace_poly(&w).unwrap());
    }

    #[test]
    fn degree_bounded_by_length(w in word_strategy(10)) {
        let p = TraceEngine::new().trace_poly(&w).unwrap();
        prop_assert!(p.total_degree().unwrap_or(0) as usize <= w.len().max(1));
    }
}
