//! Restriction of a component to the boundary torus and the A-polynomial
//! factor obtained by elimination.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::divide::{reduce_mod, strip_monomial};
use crate::algebra::gcd::{content_in, gcd, squarefree_part};
use crate::algebra::resultant::resultant;
use crate::algebra::roots::{aberth, polish};
use crate::algebra::{parse_poly, MultiPoly};
use crate::charvar::{sample_points, CURVE_VARS};
use crate::error::{Error, Result};
use crate::knot::KnotPresentation;
use crate::trace::{specialize_conjugate, TraceEngine};

pub const APOLY_VARS: [&str; 2] = ["m", "l"];

/// `(m + 1/m, l + 1/l, ml + 1/(ml))`.
pub fn t_d(m: Complex64, l: Complex64) -> Result<[Complex64; 3]> {
    if m.norm() == 0.0 || l.norm() == 0.0 {
        return Err(Error::Input("t_D needs nonzero eigenvalues".into()));
    }
    let ml = m * l;
    Ok([m + m.inv(), l + l.inv(), ml + ml.inv()])
}

/// `x² + y² + z² - xyz - 4`, zero exactly on the boundary character surface.
pub fn surface_residual(x: Complex64, y: Complex64, z: Complex64) -> Complex64 {
    x * x + y * y + z * z - x * y * z - 4.0
}

/// Traces of meridian, longitude and their product, reduced modulo a
/// component in `z`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryTriple {
    pub i_mu: MultiPoly,
    pub i_lambda: MultiPoly,
    pub i_mulambda: MultiPoly,
    pub modulus: MultiPoly,
}

impl BoundaryTriple {
    /// Bindings `u ↦ I_μ, v ↦ I_λ, w ↦ I_μλ` for peripheral trace polynomials.
    pub fn peripheral_bindings(&self) -> HashMap<String, MultiPoly> {
        let mut b = HashMap::new();
        b.insert("u".to_string(), self.i_mu.clone());
        b.insert("v".to_string(), self.i_lambda.clone());
        b.insert("w".to_string(), self.i_mulambda.clone());
        b
    }

    /// `x² + I_λ² + I_μλ² - x I_λ I_μλ - 4` reduced modulo the component.
    pub fn surface_defect(&self) -> Result<MultiPoly> {
        let (x, f, g) = (&self.i_mu, &self.i_lambda, &self.i_mulambda);
        let s = &(&(&(x * x) + &(f * f)) + &(g * g)) - &(&(x * f) * g);
        let s = &s - &MultiPoly::from_int(&CURVE_VARS, 4);
        reduce_in_z(&s, &self.modulus)
    }
}

/// Remainder modulo `modulus` in `z`; unreduced if the leading coefficient
/// in `z` is not constant.
pub fn reduce_in_z(f: &MultiPoly, modulus: &MultiPoly) -> Result<MultiPoly> {
    let f = f.with_vars(&CURVE_VARS)?;
    if modulus.lc_in("z").constant_value().is_some() && modulus.involves("z") {
        Ok(reduce_mod(&f, modulus, "z")?)
    } else {
        Ok(f)
    }
}

pub fn restriction_map(
    engine: &TraceEngine,
    component: &MultiPoly,
    pres: &KnotPresentation,
) -> Result<BoundaryTriple> {
    let lw = pres.longitude()?;
    let t = |w| -> Result<MultiPoly> {
        let p = specialize_conjugate(&engine.trace_poly(w)?);
        reduce_in_z(&p, component)
    };
    let i_mu = t(&pres.meridian)?;
    let i_lambda = t(lw)?;
    let i_mulambda = t(&pres.meridian.concat(lw))?;
    if i_mu != MultiPoly::var(&CURVE_VARS, "x") {
        return Err(Error::InvalidKnot(format!(
            "meridian trace reduces to {i_mu}, expected x"
        )));
    }
    Ok(BoundaryTriple { i_mu, i_lambda, i_mulambda, modulus: component.with_vars(&CURVE_VARS)? })
}

/// Result of eliminating `(x, z)`.
#[derive(Clone, Debug, Serialize)]
pub struct APolynomial {
    pub poly: MultiPoly,
    /// Monomials and one-variable factors removed from the eliminant.
    pub discarded: Vec<MultiPoly>,
}

/// Replaces `x` by `(m² + 1)/m` and clears the denominator.
fn substitute_x(f: &MultiPoly) -> Result<MultiPoly> {
    let vars = ["x", "m", "l"];
    let f = f.with_vars(&vars)?;
    let d = f.degree_in("x").unwrap_or(0);
    let m = MultiPoly::var(&vars, "m");
    let num = parse_poly("m^2 + 1", &vars)?;
    let coeffs = f.coeffs_in("x");
    let mut out = MultiPoly::zero(&vars);
    for (k, c) in coeffs.iter().enumerate() {
        let term = &(c * &num.pow(k as u32)) * &m.pow(d - k as u32);
        out = &out + &term;
    }
    Ok(out.with_vars(&APOLY_VARS)?)
}

/// Drops factors of `f` depending on one variable only, returning them.
fn strip_single_variable_content(f: &MultiPoly) -> (MultiPoly, Vec<MultiPoly>) {
    let mut f = f.clone();
    let mut dropped = Vec::new();
    for v in APOLY_VARS {
        let other = if v == "m" { "l" } else { "m" };
        // content with respect to `other` is a polynomial in `v` alone
        let c = content_in(&f, other);
        if c.involves(v) {
            f = f.exact_div(&c).unwrap();
            dropped.push(c.normalized());
        }
    }
    (f, dropped)
}

/// Eliminates `(x, z)` from the component, `m² - xm + 1`, `l² - I_λ l + 1`
/// and `(ml)² - I_μλ ml + 1`.
pub fn a_polynomial(triple: &BoundaryTriple) -> Result<APolynomial> {
    let vars = ["x", "z", "m", "l"];
    let c = triple.modulus.with_vars(&vars)?;
    let l = MultiPoly::var(&vars, "l");
    let m = MultiPoly::var(&vars, "m");
    let one = MultiPoly::one(&vars);
    let il = triple.i_lambda.with_vars(&vars)?;
    let iml = triple.i_mulambda.with_vars(&vars)?;
    let ml = &m * &l;
    let e1 = &(&(&l * &l) - &(&il * &l)) + &one;
    let e2 = &(&(&ml * &ml) - &(&iml * &ml)) + &one;
    let r1 = resultant(&c, &e1, "z")?;
    let r2 = resultant(&c, &e2, "z")?;
    let r1 = substitute_x(&r1.with_vars(&["x", "m", "l"])?)?;
    let r2 = substitute_x(&r2.with_vars(&["x", "m", "l"])?)?;
    let g = gcd(&r1, &r2);
    if g.is_zero() || g.is_constant() {
        return Err(Error::NoCurve("component maps to a point".into()));
    }
    let mut discarded = Vec::new();
    let stripped = strip_monomial(&g);
    if stripped != g {
        discarded.push(g.exact_div(&stripped).unwrap().normalized());
    }
    let (core, dropped) = strip_single_variable_content(&stripped);
    discarded.extend(dropped);
    let poly = squarefree_part(&core).with_vars(&APOLY_VARS)?.normalized();
    if !poly.involves("m") || !poly.involves("l") {
        return Err(Error::NoCurve("component maps to a point".into()));
    }
    Ok(APolynomial { poly, discarded })
}

/// Eigenvalue lift of a curve point: `m + 1/m = x`, `l + 1/l = I_λ` and
/// `ml + 1/(ml) = I_μλ`, choosing the `l` that fits the last equation.
pub fn lift_point(triple: &BoundaryTriple, x: Complex64, z: Complex64) -> (Complex64, Complex64) {
    let pt = [x, z];
    let f = triple.i_lambda.with_vars(&CURVE_VARS).unwrap().eval_complex(&pt);
    let g = triple.i_mulambda.with_vars(&CURVE_VARS).unwrap().eval_complex(&pt);
    let m = crate::charvar::eigenvalue(x);
    let l1 = crate::charvar::eigenvalue(f);
    let l2 = l1.inv();
    let fit = |l: Complex64| ((m * l) + (m * l).inv() - g).norm();
    let l = if fit(l1) <= fit(l2) { l1 } else { l2 };
    (m, l)
}

/// Scale-relative residual `|A(m,l)| / Σ|terms|`.
pub fn relative_residual(a: &MultiPoly, m: Complex64, l: Complex64) -> f64 {
    let pt = [m, l];
    a.eval_complex(&pt).norm() / a.eval_abs_scale(&pt).max(1e-300)
}

#[derive(Clone, Debug, Serialize)]
pub struct PointTest {
    pub points: usize,
    pub max_residual: f64,
    pub max_relative_residual: f64,
    /// Largest distance from a sampled A₀ point to the image of the
    /// component (reverse inclusion).
    pub max_reverse_defect: f64,
}

/// Forward test: lifted component points lie on `A₀`; reverse test: random
/// points of `A₀` come from the component.
pub fn point_test(triple: &BoundaryTriple, a: &MultiPoly, n: usize, seed: u64) -> Result<PointTest> {
    let mut max_res: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    for (x, z) in sample_points(&triple.modulus, n, seed)? {
        let (m, l) = lift_point(triple, x, z);
        max_res = max_res.max(a.eval_complex(&[m, l]).norm());
        max_rel = max_rel.max(relative_residual(a, m, l));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut max_rev: f64 = 0.0;
    let lc = a.coeffs_in("l");
    let modz = triple.modulus.coeffs_in("z");
    for _ in 0..n.min(20) {
        let m = Complex64::from_polar(rng.gen_range(0.6..1.6), rng.gen_range(0.0..6.28));
        let lcoef: Vec<Complex64> = lc.iter().map(|c| c.eval_complex_named(&[("m", m)])).collect();
        let x = m + m.inv();
        let zcoef: Vec<Complex64> = modz.iter().map(|c| c.eval_complex_named(&[("x", x)])).collect();
        let zs: Vec<Complex64> = aberth(&zcoef)?.into_iter().map(|z| polish(&zcoef, z)).collect();
        for l in aberth(&lcoef)? {
            let l = polish(&lcoef, l);
            let y = l + l.inv();
            let w = m * l + (m * l).inv();
            let best = zs
                .iter()
                .map(|z| {
                    let pt = [x, *z];
                    let f = triple.i_lambda.eval_complex(&pt);
                    let g = triple.i_mulambda.eval_complex(&pt);
                    ((f - y).norm() + (g - w).norm()) / (1.0 + y.norm() + w.norm())
                })
                .fold(f64::INFINITY, f64::min);
            max_rev = max_rev.max(best);
        }
    }
    Ok(PointTest {
        points: n,
        max_residual: max_res,
        max_relative_residual: max_rel,
        max_reverse_defect: max_rev,
    })
}

/// `m^dm l^dl A(1/m, 1/l) = ±A(m, l)`.
pub fn is_sigma_symmetric(a: &MultiPoly) -> bool {
    let dm = a.degree_in("m").unwrap_or(0);
    let dl = a.degree_in("l").unwrap_or(0);
    let flipped = MultiPoly::from_terms(
        a.vars(),
        a.terms().map(|(e, c)| (vec![dm - e.0[0], dl - e.0[1]], c.clone())),
    );
    let flipped = strip_monomial(&flipped);
    flipped == *a || flipped == -a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charvar::defining_polynomial;

    #[test]
    fn t_d_examples() {
        let i = Complex64::new(0.0, 1.0);
        let t = t_d(i, Complex64::new(-1.0, 0.0)).unwrap();
        assert!((t[0]).norm() < 1e-15 && (t[1] + 2.0).norm() < 1e-15 && t[2].norm() < 1e-15);
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(t_d(one, one).unwrap(), [Complex64::new(2.0, 0.0); 3]);
        assert!(t_d(Complex64::new(0.0, 0.0), one).is_err());
        assert_eq!(surface_residual(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), Complex64::new(-4.0, 0.0));
    }

    #[test]
    fn fig8_restriction_and_apoly() {
        let k = KnotPresentation::builtin("fig8").unwrap();
        let e = TraceEngine::new();
        let curve = defining_polynomial(&e, &k, 3).unwrap();
        let c = curve.nonabelian().unwrap();
        let tr = restriction_map(&e, c, &k).unwrap();
        assert_eq!(tr.i_lambda, parse_poly("x^4 - 5*x^2 + 2", &CURVE_VARS).unwrap());
        assert_eq!(
            tr.i_mulambda,
            parse_poly("(4*x - x^3)*z + x^5 - 4*x^3 - x", &CURVE_VARS).unwrap()
        );
        assert!(tr.surface_defect().unwrap().is_zero());
        let a = a_polynomial(&tr).unwrap();
        let expected =
            parse_poly("l^2*m^4 - l*(m^8 - m^6 - 2*m^4 - m^2 + 1) + m^4", &APOLY_VARS).unwrap();
        assert_eq!(a.poly, expected.normalized());
        assert!(is_sigma_symmetric(&a.poly));
        let pt = point_test(&tr, &a.poly, 50, 11).unwrap();
        assert!(pt.max_relative_residual < 1e-10, "{pt:?}");
        assert!(pt.max_reverse_defect < 1e-8, "{pt:?}");
    }
}
