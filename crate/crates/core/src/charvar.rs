//! The SL₂(ℂ) character variety of a two-bridge style presentation as a
//! plane curve in `(x, z) = (tr a, tr ab)` with `tr b = x`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::algebraic::{eval_quadratic, low_degree_factors, AlgebraicNumber, QuadElem};
use crate::algebra::gcd::{gcd, gcd_many, squarefree_part};
use crate::algebra::resultant::resultant;
use crate::algebra::roots::{aberth, complex_coeffs, polish};
use crate::algebra::{parse_poly, MultiPoly};
use crate::error::{Error, Result};
use crate::knot::KnotPresentation;
use crate::matrix::{eval_word, Mat2};
use crate::trace::{specialize_conjugate, TraceEngine};
use crate::word::GroupWord;

pub const CURVE_VARS: [&str; 2] = ["x", "z"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    /// Characters of abelian representations, `x² - z - 2 = 0`.
    Abelian,
    Nonabelian,
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub kind: ComponentKind,
    pub poly: MultiPoly,
}

/// Squarefree plane curve in `(x, z)` split into the abelian factor and
/// the rest.
#[derive(Clone, Debug, Serialize)]
pub struct PlaneCurve {
    pub poly: MultiPoly,
    pub components: Vec<Component>,
}

impl PlaneCurve {
    pub fn nonabelian(&self) -> Result<&MultiPoly> {
        self.components
            .iter()
            .find(|c| c.kind == ComponentKind::Nonabelian)
            .map(|c| &c.poly)
            .ok_or_else(|| Error::NoCurve("no nonabelian component".into()))
    }
}

pub fn abelian_factor() -> MultiPoly {
    parse_poly("x^2 - z - 2", &CURVE_VARS).unwrap()
}

/// `(σ(R) - 2, σ(Ra) - x, σ(Rb) - x)` specialized at `y = x`.
pub fn rep_conditions(engine: &TraceEngine, relator: &GroupWord) -> Result<[MultiPoly; 3]> {
    if relator.is_empty() {
        let z = MultiPoly::zero(&CURVE_VARS);
        return Ok([z.clone(), z.clone(), z]);
    }
    let two = MultiPoly::from_int(&CURVE_VARS, 2);
    let x = MultiPoly::var(&CURVE_VARS, "x");
    let t = |w: &GroupWord| -> Result<MultiPoly> { Ok(specialize_conjugate(&engine.trace_poly(w)?)) };
    let r = t(relator)? - two;
    let ra = t(&relator.concat(&GroupWord::generator(0)))? - x.clone();
    let rb = t(&relator.concat(&GroupWord::generator(1)))? - x;
    Ok([r, ra, rb])
}

/// Generator of the common zero locus of the representation conditions,
/// split into components and verified numerically.
pub fn defining_polynomial(engine: &TraceEngine, pres: &KnotPresentation, seed: u64) -> Result<PlaneCurve> {
    if pres.relator.is_empty() {
        return Err(Error::NoCurve("relator defines free group".into()));
    }
    let conds = rep_conditions(engine, &pres.relator)?;
    if conds.iter().all(MultiPoly::is_zero) {
        return Err(Error::NoCurve("relator defines free group".into()));
    }
    let g = gcd_many(&CURVE_VARS, &conds);
    if g.is_constant() {
        return Err(Error::NoCurve(format!(
            "{}: the representation conditions have no common curve factor",
            pres.name
        )));
    }
    let poly = squarefree_part(&g).with_vars(&CURVE_VARS)?;
    let ab = abelian_factor();
    let mut components = Vec::new();
    let mut rest = poly.clone();
    if let Some(q) = rest.exact_div(&ab) {
        components.push(Component { kind: ComponentKind::Abelian, poly: ab.clone() });
        rest = q.normalized();
    }
    if !rest.is_constant() {
        components.push(Component { kind: ComponentKind::Nonabelian, poly: rest });
    }
    let curve = PlaneCurve { poly: poly.normalized(), components };
    for c in &curve.components {
        for cond in &conds {
            if cond.exact_div(&c.poly).is_none() && !cond.is_zero() {
                return Err(Error::Verification(format!(
                    "factor {} does not divide condition {}",
                    c.poly, cond
                )));
            }
        }
        verify_component(c, pres, seed)?;
    }
    Ok(curve)
}

/// Random points on a curve `f(x, z) = 0`: `x` drawn from a complex box,
/// `z` a root of `f(x, ·)`.
pub fn sample_points(f: &MultiPoly, n: usize, seed: u64) -> Result<Vec<(Complex64, Complex64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = f.coeffs_in("z");
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < n {
        attempts += 1;
        if attempts > 20 * n + 20 {
            return Err(Error::Numeric("could not sample curve points".into()));
        }
        let x = Complex64::new(rng.gen_range(-2.5..2.5), rng.gen_range(-1.5..1.5));
        let zc: Vec<Complex64> = coeffs
            .iter()
            .map(|c| c.eval_complex_named(&[("x", x)]))
            .collect();
        if zc.len() < 2 {
            continue;
        }
        let roots = aberth(&zc)?;
        if roots.is_empty() {
            continue;
        }
        let k = rng.gen_range(0..roots.len());
        out.push((x, polish(&zc, roots[k])));
    }
    Ok(out)
}

fn verify_component(c: &Component, pres: &KnotPresentation, seed: u64) -> Result<()> {
    for (x, z) in sample_points(&c.poly, 10, seed ^ 0x5eed)? {
        let rep = numeric_rep_at((x, z), pres);
        let ok = match c.kind {
            ComponentKind::Abelian => abelian_rep_residual(x, pres) < 1e-7,
            ComponentKind::Nonabelian => rep.residual < 1e-7 || rep.reducible,
        };
        if !ok {
            return Err(Error::Verification(format!(
                "factor {} fails numeric reconstruction at x = {x}, z = {z}: residual {:.2e}",
                c.poly, rep.residual
            )));
        }
    }
    Ok(())
}

/// `‖ρ(R) - I‖` for the diagonal representation `a, b ↦ diag(s, 1/s)`.
pub fn abelian_rep_residual(x: Complex64, pres: &KnotPresentation) -> f64 {
    let s = eigenvalue(x);
    let zero = Complex64::new(0.0, 0.0);
    let d = Mat2::new(s, zero, zero, s.inv());
    eval_word(&pres.relator, &[d, d]).dist(&Mat2::identity())
}

/// Eigenvalue `s` with `s + 1/s = x`, choosing `|s| ≥ 1`.
pub fn eigenvalue(x: Complex64) -> Complex64 {
    let disc = (x * x - 4.0).sqrt();
    let s = (x + disc) / 2.0;
    if s.norm() >= 1.0 {
        s
    } else {
        (x - disc) / 2.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericRep {
    pub a: Option<[[Complex64; 2]; 2]>,
    pub b: Option<[[Complex64; 2]; 2]>,
    /// `‖ρ(R) - I‖`, max-entry norm.
    pub residual: f64,
    pub reducible: bool,
    /// Cusp parameter `(L₀₁/L₀₀)/(A₀₁/A₀₀)` when `x = ±2`.
    pub translation: Option<Complex64>,
}

/// Builds `A = [[s, 1], [0, 1/s]]`, `B = [[s, 0], [c, 1/s]]` with
/// `tr A = tr B = x`, `tr AB = z` and evaluates the relator.
pub fn numeric_rep_at(point: (Complex64, Complex64), pres: &KnotPresentation) -> NumericRep {
    let (x, z) = point;
    let s = eigenvalue(x);
    let c = z - x * x + 2.0;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let a = Mat2::new(s, one, zero, s.inv());
    let b = Mat2::new(s, zero, c, s.inv());
    let residual = eval_word(&pres.relator, &[a, b]).dist(&Mat2::identity());
    if c.norm() < 1e-9 * (1.0 + z.norm()) {
        return NumericRep { a: None, b: None, residual, reducible: true, translation: None };
    }
    let parabolic = (x - 2.0).norm() < 1e-9 || (x + 2.0).norm() < 1e-9;
    let translation = match (parabolic, &pres.longitude) {
        (true, Some(lw)) => {
            let l = eval_word(lw, &[a, b]);
            Some((l.0[0][1] / l.0[0][0]) / (a.0[0][1] / a.0[0][0]))
        }
        _ => None,
    };
    NumericRep { a: Some(a.0), b: Some(b.0), residual, reducible: false, translation }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducibleCharacter {
    pub x: AlgebraicNumber,
    pub z: AlgebraicNumber,
    /// Multiplicity of `z` as a root of `f(x, ·)`.
    pub multiplicity: u32,
    /// Whether `f(x, z) = 0` was confirmed in exact arithmetic.
    pub exact: bool,
}

/// `Res_t(Δ(t), t x² - (t+1)²)`: vanishes at `x = m + 1/m` whenever
/// `Δ(m²) = 0`.
pub fn alexander_x_polynomial(alexander: &MultiPoly) -> Result<MultiPoly> {
    let vars = ["x", "t"];
    let delta = alexander.with_vars(&vars)?;
    let g = parse_poly("t*x^2 - (t+1)^2", &vars)?;
    Ok(resultant(&delta, &g, "t")?.normalized())
}

fn z_roots_exact(f: &MultiPoly, xfactor: &MultiPoly) -> Result<(Vec<MultiPoly>, MultiPoly)> {
    // minimal polynomials of the z-coordinates above the roots of xfactor
    let xf = xfactor.with_vars(&CURVE_VARS)?;
    let zpoly = resultant(&xf, f, "x")?;
    if zpoly.is_zero() {
        return Err(Error::Numeric("curve contains a vertical line".into()));
    }
    Ok(low_degree_factors(&zpoly.with_vars(&["z"])?, "z")?)
}

/// Characters on `f` that are also reducible, with `z`-multiplicity.
pub fn reducible_characters(f: &MultiPoly, alexander: &MultiPoly) -> Result<Vec<ReducibleCharacter>> {
    let f = f.with_vars(&CURVE_VARS)?;
    let ex = alexander_x_polynomial(alexander)?;
    let mut out = Vec::new();
    if !ex.involves("x") {
        return Ok(out);
    }
    let (xfactors, xrest) = low_degree_factors(&ex.with_vars(&["x"])?, "x")?;
    let mut groups: Vec<MultiPoly> = xfactors;
    if xrest.involves("x") {
        groups.push(xrest);
    }
    groups.dedup();
    for xf in groups {
        let xc = complex_coeffs(&xf, "x")?;
        let (zfactors, _) = z_roots_exact(&f, &xf)?;
        for xr in aberth(&xc)? {
            let xr = polish(&xc, xr);
            let xnum = AlgebraicNumber::from_factor(&xf, "x", xr)?;
            let zc: Vec<Complex64> = f
                .coeffs_in("z")
                .iter()
                .map(|c| c.eval_complex_named(&[("x", xr)]))
                .collect();
            let zs = aberth(&zc)?;
            // distinct z values with numeric clustering, exact confirmation below
            let mut seen: Vec<Complex64> = Vec::new();
            for zr in zs {
                if seen.iter().any(|s| (s - zr).norm() < 1e-5 * (1.0 + s.norm())) {
                    continue;
                }
                seen.push(zr);
                let mut znum = AlgebraicNumber::Numeric { value: zr, minpoly: MultiPoly::zero(&["z"]) };
                let mut best = f64::INFINITY;
                for zf in &zfactors {
                    for cand in aberth(&complex_coeffs(zf, "z")?)? {
                        let d = (cand - zr).norm();
                        if d < best && d < 1e-4 * (1.0 + zr.norm()) {
                            best = d;
                            znum = AlgebraicNumber::from_factor(zf, "z", cand)?;
                        }
                    }
                }
                let (mult, exact) = z_multiplicity(&f, &xnum, &znum, xr, zr);
                out.push(ReducibleCharacter { x: xnum.clone(), z: znum, multiplicity: mult, exact });
            }
        }
    }
    out.sort_by(|a, b| {
        let (p, q) = (a.x.to_complex(), b.x.to_complex());
        p.re.partial_cmp(&q.re).unwrap().then(p.im.partial_cmp(&q.im).unwrap())
    });
    Ok(out)
}

fn common_field(x: &AlgebraicNumber, z: &AlgebraicNumber) -> Option<(QuadElem, QuadElem, BigInt)> {
    let (xq, dx) = x.as_quadratic()?;
    let (zq, dz) = z.as_quadratic()?;
    let d = if dx.is_one() { dz.clone() } else { dx.clone() };
    if !dx.is_one() && !dz.is_one() && dx != dz {
        return None;
    }
    Some((xq, zq, d))
}

fn z_multiplicity(
    f: &MultiPoly,
    x: &AlgebraicNumber,
    z: &AlgebraicNumber,
    xr: Complex64,
    zr: Complex64,
) -> (u32, bool) {
    let mut g = f.clone();
    if let Some((xq, zq, d)) = common_field(x, z) {
        let mut k = 0;
        while !g.is_zero() && eval_quadratic(&g, &[xq.clone(), zq.clone()], &d).is_zero() {
            k += 1;
            g = g.derivative("z");
        }
        return (k, k > 0);
    }
    let mut k = 0;
    while !g.is_zero() {
        let v = g.eval_complex(&[xr, zr]);
        if v.norm() > 1e-6 * (1.0 + g.eval_abs_scale(&[xr, zr])) {
            break;
        }
        k += 1;
        g = g.derivative("z");
    }
    (k, false)
}

/// True when `f`, `∂f/∂x`, `∂f/∂z` have no common affine zero.
pub fn is_smooth(f: &MultiPoly) -> Result<bool> {
    let f = f.with_vars(&CURVE_VARS)?;
    let fx = f.derivative("x");
    let fz = f.derivative("z");
    let r1 = resultant(&f, &fx, "z")?;
    let r2 = resultant(&f, &fz, "z")?;
    let g = gcd(&r1, &r2);
    if g.is_zero() {
        return Ok(false);
    }
    if !g.involves("x") {
        return Ok(true);
    }
    // candidate x-values: check for a common z numerically
    let gx = g.with_vars(&["x"])?;
    let c = complex_coeffs(&gx, "x")?;
    for xr in aberth(&c)? {
        let zc: Vec<Complex64> = f
            .coeffs_in("z")
            .iter()
            .map(|p| p.eval_complex_named(&[("x", xr)]))
            .collect();
        for zr in aberth(&zc)? {
            let pt = [xr, zr];
            let small = |p: &MultiPoly| p.eval_complex(&pt).norm() < 1e-7 * (1.0 + p.eval_abs_scale(&pt));
            if small(&f) && small(&fx) && small(&fz) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig8_curve() {
        let k = KnotPresentation::builtin("fig8").unwrap();
        let e = TraceEngine::new();
        let c = defining_polynomial(&e, &k, 1).unwrap();
        let expected = parse_poly("(x^2-z-2)*(z^2-(1+x^2)*z+2*x^2-1)", &CURVE_VARS).unwrap();
        assert_eq!(c.poly, expected.normalized());
        assert_eq!(c.components.len(), 2);
    }

    #[test]
    fn fig8_reducible_characters() {
        let k = KnotPresentation::builtin("fig8").unwrap();
        let f = parse_poly("z^2-(1+x^2)*z+2*x^2-1", &CURVE_VARS).unwrap();
        let r = reducible_characters(&f, &k.alexander).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].x.to_string(), "-sqrt(5)");
        assert_eq!(r[1].x.to_string(), "sqrt(5)");
        for c in &r {
            assert_eq!(c.z.to_string(), "3");
            assert_eq!(c.multiplicity, 2);
            assert!(c.exact);
        }
    }

    #[test]
    fn empty_relator_is_rejected() {
        let e = TraceEngine::new();
        let conds = rep_conditions(&e, &GroupWord::empty()).unwrap();
        assert!(conds.iter().all(MultiPoly::is_zero));
    }

    #[test]
    fn unit_alexander_has_no_reducibles() {
        let f = parse_poly("z^2-(1+x^2)*z+2*x^2-1", &CURVE_VARS).unwrap();
        let r = reducible_characters(&f, &MultiPoly::one(&["t"])).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn riley_normal_form() {
        let k = KnotPresentation::builtin("fig8").unwrap();
        // z = (5 + sqrt(-3))/2 at x = 2 is the holonomy character
        let z = Complex64::new(2.5, 3f64.sqrt() / 2.0);
        let rep = numeric_rep_at((Complex64::new(2.0, 0.0), z), &k);
        assert!(rep.residual < 1e-8, "{}", rep.residual);
        assert!(!rep.reducible);
        let t = rep.translation.unwrap();
        assert!((t.norm() - 2.0 * 3f64.sqrt()).abs() < 1e-8, "{t}");
        let red = numeric_rep_at((Complex64::new(5f64.sqrt(), 0.0), Complex64::new(3.0, 0.0)), &k);
        assert!(red.reducible);
    }
}
