use knotchar::algebra::{gcd, parse_poly, resultant, squarefree_part, MultiPoly};
use knotchar::algebra::rational::int;
use proptest::prelude::*;

const VARS: [&str; 2] = ["x", "z"];

fn poly(max_deg: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((0..=max_deg, 0..=max_deg, -4i64..=4), 1..=max_terms).prop_map(|terms| {
        MultiPoly::from_terms(&VARS, terms.into_iter().map(|(a, b, c)| (vec![a, b], int(c))))
    })
}

fn nonconstant(max_deg: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    poly(max_deg, max_terms).prop_filter("nonconstant", |p| !p.is_constant())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(f in poly(3, 4), g in poly(3, 4), h in poly(3, 4)) {
        prop_assert_eq!(&(&f + &g) * &h, &(&f * &h) + &(&g * &h));
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert!((&f - &f).is_zero());
    }

    #[test]
    fn display_round_trips(f in poly(4, 6)) {
        prop_assert_eq!(parse_poly(&f.to_string(), &VARS).unwrap(), f);
    }

    #[test]
    fn exact_division_undoes_products(f in poly(3, 4), g in poly(3, 4)) {
        prop_assume!(!g.is_zero());
        prop_assert_eq!((&f * &g).exact_div(&g), Some(f));
    }

    #[test]
    fn gcd_keeps_common_factors(f in poly(2, 3), g in poly(2, 3), h in nonconstant(2, 3)) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let d = gcd(&(&f * &h), &(&g * &h));
        prop_assert!(d.exact_div(&h).is_some(), "gcd {} misses {}", d, h);
        prop_assert!((&f * &h).exact_div(&d).is_some());
    }

    #[test]
    fn resultant_is_multiplicative(f in nonconstant(2, 3), g in nonconstant(2, 3), h in nonconstant(2, 3)) {
        prop_assume!(f.involves("z") && g.involves("z") && h.involves("z"));
        let lhs = resultant(&(&f * &g), &h, "z").unwrap();
        let rhs = &resultant(&f, &h, "z").unwrap() * &resultant(&g, &h, "z").unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn squarefree_part_ignores_squares(f in nonconstant(2, 3)) {
        let a = squarefree_part(&(&f * &f)).normalized();
        let b = squarefree_part(&f).normalized();
        prop_assert_eq!(a, b);
    }
}
