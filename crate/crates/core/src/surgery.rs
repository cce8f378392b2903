//! Intersections of the restricted component with the curves
//! `m^p l^q = ±1`, the counts `b(p,q)` and `λ(p,q)`, and their comparison
//! with the Culler-Shalen norm.

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::algebraic::low_degree_factors;
use crate::algebra::rational::rat;
use crate::algebra::roots::{aberth, backward_error, complex_coeffs, polish};
use crate::algebra::{resultant, yun, AlgebraicNumber, MultiPoly, Rational};
use crate::boundary::{lift_point, reduce_in_z, BoundaryTriple};
use crate::charvar::{ReducibleCharacter, CURVE_VARS};
use crate::error::{Error, Result};
use crate::ideal::{branch_expansions, projective_closure, valuation_adaptive, NormReport, ProjectiveCurve, MAX_ORDER};
use crate::trace::{peripheral_trace, specialize};

/// Attempts at a separating shear before giving up.
const SHEAR_ATTEMPTS: u64 = 16;
/// Relative tolerance for matching numeric points.
const MATCH_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SurgerySlope {
    pub p: i64,
    pub q: i64,
}

impl SurgerySlope {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::Input("slope (0,0)".into()));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::Input(format!("slope ({p},{q}) is not primitive")));
        }
        Ok(SurgerySlope { p, q })
    }
}

/// `I_γ` on the component: `tr(μ^p λ^q)` with `(u, v, w) ↦ (x, I_λ, I_μλ)`,
/// reduced in `z`.
pub fn gamma_trace_on_component(slope: SurgerySlope, triple: &BoundaryTriple) -> Result<MultiPoly> {
    let (p, q) = (i32::try_from(slope.p), i32::try_from(slope.q));
    let (Ok(p), Ok(q)) = (p, q) else {
        return Err(Error::Input("slope out of range".into()));
    };
    let t = peripheral_trace(p, q)?;
    let g = specialize(&t, &triple.peripheral_bindings());
    reduce_in_z(&g.with_vars(&CURVE_VARS)?, &triple.modulus)
}

/// One intersection point.
#[derive(Clone, Debug, Serialize)]
pub struct ChiEntry {
    /// `χ(γ)`, either 2 or -2.
    pub trace: i32,
    pub x: AlgebraicNumber,
    pub z: AlgebraicNumber,
    pub multiplicity: u32,
    pub reducible: bool,
    /// `χ(μ) = ±2`.
    pub excluded: bool,
    /// Image of `(±1, ±1)`, where `t_D` is not 2:1.
    pub corner: bool,
    /// `|m^p l^q - χ(γ)/2|` at the eigenvalue lift.
    pub lift_residual: f64,
    /// Order of `I_γ ∓ 2` along each branch of the component through the point.
    pub branch_orders: Vec<i64>,
}

/// Factors of `Res_z(component, I_γ - trace)` in `x`.
#[derive(Clone, Debug, Serialize)]
pub struct Eliminant {
    pub trace: i32,
    pub factors: Vec<(MultiPoly, u32)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurgeryReport {
    pub slope: SurgerySlope,
    pub seed: u64,
    /// `c` in the coordinate change `ℓ = x + c z`.
    pub shear: String,
    pub gamma_poly: MultiPoly,
    pub eliminants: Vec<Eliminant>,
    pub chi_list: Vec<ChiEntry>,
    pub b: u32,
    pub lambda: u32,
    /// Reading `λ` as a count of characters of the filled manifold assumes
    /// every character in `S(p,q)` extends; recorded, not checked.
    pub assumes_extension_conjecture: bool,
}

impl SurgeryReport {
    /// Distinct non-excluded `x` values with the given `χ(γ)`, sorted.
    pub fn x_values(&self, trace: i32) -> Vec<Complex64> {
        let mut xs: Vec<Complex64> = self
            .chi_list
            .iter()
            .filter(|e| e.trace == trace && !e.excluded)
            .map(|e| e.x.to_complex())
            .collect();
        xs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        xs.dedup_by(|a, b| close(*a, *b));
        xs
    }
}

/// Exact recognition of roots against rational factors of degree ≤ 2.
struct Recognizer {
    var: &'static str,
    exact: Vec<MultiPoly>,
    rest: Vec<MultiPoly>,
}

impl Recognizer {
    fn new(factors: &[(MultiPoly, u32)], var: &'static str) -> Self {
        let (exact, rest) = factors
            .iter()
            .map(|(g, _)| g.clone())
            .partition(|g| g.degree_in(var).unwrap_or(0) <= 2);
        Recognizer { var, exact, rest }
    }

    fn closest(&self, approx: Complex64) -> Result<AlgebraicNumber> {
        let mut best: Option<(f64, AlgebraicNumber)> = None;
        for g in &self.exact {
            for r in aberth(&complex_coeffs(g, self.var)?)? {
                let d = (r - approx).norm();
                if best.as_ref().map_or(true, |b| d < b.0) {
                    best = Some((d, AlgebraicNumber::from_factor(g, self.var, r)?));
                }
            }
        }
        if let Some((d, a)) = best {
            if d <= MATCH_TOL * (1.0 + approx.norm()) {
                return Ok(a);
            }
        }
        // keep the caller's value, which is consistent with the other coordinate
        let minpoly = self
            .rest
            .iter()
            .find(|g| {
                complex_coeffs(g, self.var)
                    .map(|c| backward_error(&c, approx) < 1e-8)
                    .unwrap_or(false)
            })
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(&[self.var]));
        Ok(AlgebraicNumber::Numeric { value: approx, minpoly })
    }
}

fn shear_for(seed: u64, attempt: u64) -> Rational {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(attempt));
    let n: i64 = rng.gen_range(1..=9);
    let d: i64 = rng.gen_range(1..=3);
    let s = if rng.gen_bool(0.5) { 1 } else { -1 };
    rat(s * n, d)
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= MATCH_TOL * (1.0 + a.norm().max(b.norm()))
}

/// Inputs shared by every slope on one component.
pub struct SurgeryContext {
    pub triple: BoundaryTriple,
    pub curve: ProjectiveCurve,
    pub reducible: Vec<ReducibleCharacter>,
}

struct RawPoint {
    x: Complex64,
    z: Complex64,
    multiplicity: u32,
}

impl SurgeryContext {
    pub fn new(triple: &BoundaryTriple, reducible: Vec<ReducibleCharacter>) -> Result<Self> {
        Ok(SurgeryContext { triple: triple.clone(), curve: projective_closure(&triple.modulus)?, reducible })
    }

    /// Intersection points of the component with `I_γ = ±2`, multiplicities
    /// read off the eliminant after a seeded shear `x ↦ x - c z`.
    pub fn intersection_set(&self, slope: SurgerySlope, seed: u64) -> Result<SurgeryReport> {
        let comp = self.triple.modulus.with_vars(&CURVE_VARS)?;
        let ig = gamma_trace_on_component(slope, &self.triple)?;
        let mut eliminants = Vec::new();
        let mut sides = Vec::new();
        for trace in [2i32, -2] {
            let h = &ig - &MultiPoly::from_int(&CURVE_VARS, trace as i64);
            let ex = resultant(&comp, &h, "z")?;
            if ex.is_zero() || reduce_in_z(&h, &comp)?.is_zero() {
                return Err(Error::Input(format!(
                    "slope ({},{}) degenerate on component",
                    slope.p, slope.q
                )));
            }
            let ex = ex.with_vars(&["x"])?;
            let factors = split_factors(&ex)?;
            let cands = candidates(&comp, &ex)?;
            sides.push((trace, h, cands, Recognizer::new(&factors, "x")));
            eliminants.push(Eliminant { trace, factors });
        }

        let mut last_err = None;
        for attempt in 0..SHEAR_ATTEMPTS {
            let c = shear_for(seed, attempt);
            let mut chi_list = Vec::new();
            let mut ok = true;
            for (trace, h, cands, rx) in &sides {
                match self.sheared_points(&comp, h, &c, cands) {
                    Ok(points) => {
                        for pt in points {
                            chi_list.push(self.entry(slope, *trace, h, pt, rx)?);
                        }
                    }
                    Err(e) => {
                        last_err = Some(e);
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            chi_list.sort_by(|a, b| {
                let (p, q) = (a.x.to_complex(), b.x.to_complex());
                b.trace
                    .cmp(&a.trace)
                    .then(p.re.total_cmp(&q.re))
                    .then(p.im.total_cmp(&q.im))
                    .then(a.z.to_complex().re.total_cmp(&b.z.to_complex().re))
                    .then(a.z.to_complex().im.total_cmp(&b.z.to_complex().im))
            });
            let b = chi_list.iter().map(|e| e.multiplicity).sum();
            let lambda = chi_list.iter().filter(|e| !e.excluded).map(|e| e.multiplicity).sum();
            return Ok(SurgeryReport {
                slope,
                seed,
                shear: c.to_string(),
                gamma_poly: ig,
                eliminants,
                chi_list,
                b,
                lambda,
                assumes_extension_conjecture: true,
            });
        }
        Err(last_err.unwrap_or_else(|| Error::Numeric("no separating shear found".into())))
    }

    fn sheared_points(
        &self,
        comp: &MultiPoly,
        h: &MultiPoly,
        c: &Rational,
        cands: &[(Complex64, Complex64)],
    ) -> Result<Vec<RawPoint>> {
        let x = MultiPoly::var(&CURVE_VARS, "x");
        let z = MultiPoly::var(&CURVE_VARS, "z");
        let sub = &x - &z.scale(c);
        let cs = comp.substitute_one("x", &sub).with_vars(&CURVE_VARS)?;
        let hs = h.substitute_one("x", &sub).with_vars(&CURVE_VARS)?;
        if cs.lc_in("z").constant_value().is_none() {
            return Err(Error::Numeric(format!("shear {c} leaves a point at infinity in z")));
        }
        let r = resultant(&cs, &hs, "z")?.with_vars(&["x"])?;
        let cf = rat_to_c(c);
        let mut out = Vec::new();
        let mut used = vec![false; cands.len()];
        for (g, mult) in yun(&r, "x") {
            let gc = complex_coeffs(&g, "x")?;
            for l0 in aberth(&gc)? {
                let l0 = polish(&gc, l0);
                let scale = 1.0 + l0.norm();
                let mut dist: Vec<(f64, usize)> = cands
                    .iter()
                    .enumerate()
                    .map(|(i, (xc, zc))| ((xc + cf * zc - l0).norm() / scale, i))
                    .collect();
                dist.sort_by(|a, b| a.0.total_cmp(&b.0));
                let Some(&(d0, i0)) = dist.first() else {
                    return Err(Error::Numeric("eliminant root with no candidate point".into()));
                };
                if d0 > 1e-6 {
                    return Err(Error::Numeric(format!("no candidate point on the line x + {c} z = {l0}")));
                }
                if dist.get(1).is_some_and(|d| d.0 < 1e-4) || used[i0] {
                    return Err(Error::Numeric(format!("shear {c} does not separate points")));
                }
                used[i0] = true;
                out.push(RawPoint { x: cands[i0].0, z: cands[i0].1, multiplicity: mult });
            }
        }
        Ok(out)
    }

    fn entry(
        &self,
        slope: SurgerySlope,
        trace: i32,
        h: &MultiPoly,
        pt: RawPoint,
        rx: &Recognizer,
    ) -> Result<ChiEntry> {
        let x = rx.closest(pt.x)?;
        let z = exact_z(&self.triple.modulus, &x, pt.z)?;
        let (xc, zc) = (x.to_complex(), z.to_complex());
        let two = Complex64::new(2.0, 0.0);
        let excluded = match x.as_rational() {
            Some(r) => *r == rat(2, 1) || *r == rat(-2, 1),
            None => close(xc, two) || close(xc, -two),
        };
        let il = self.triple.i_lambda.eval_complex(&[xc, zc]);
        let corner = excluded && (close(il, two) || close(il, -two));
        let reducible = self.reducible.iter().any(|r| close(r.x.to_complex(), xc) && close(r.z.to_complex(), zc));
        let lift_residual = if excluded {
            0.0
        } else {
            let (m, l) = lift_point(&self.triple, xc, zc);
            let w = m.powi(slope.p as i32) * l.powi(slope.q as i32);
            (w - Complex64::new(trace as f64 / 2.0, 0.0)).norm()
        };
        let point = [xc, Complex64::new(1.0, 0.0), zc];
        let branch_orders = match branch_expansions(&self.curve, &point, 8) {
            Ok(bs) => (0..bs.len())
                .map(|i| valuation_adaptive(&self.curve, &point, i, h, None, MAX_ORDER))
                .collect::<Result<Vec<i64>>>()
                .unwrap_or_default(),
            Err(_) => Vec::new(),
        };
        Ok(ChiEntry {
            trace,
            x,
            z,
            multiplicity: pt.multiplicity,
            reducible,
            excluded,
            corner,
            lift_residual,
            branch_orders,
        })
    }
}

/// Points `(x, z)` of the component above the roots of `ex`.
fn candidates(comp: &MultiPoly, ex: &MultiPoly) -> Result<Vec<(Complex64, Complex64)>> {
    let mut out = Vec::new();
    for (g, _) in yun(ex, "x") {
        let gc = complex_coeffs(&g, "x")?;
        for x0 in aberth(&gc)? {
            let x0 = polish(&gc, x0);
            let zc: Vec<Complex64> =
                comp.coeffs_in("z").iter().map(|k| k.eval_complex_named(&[("x", x0)])).collect();
            if zc.len() < 2 {
                continue;
            }
            for z0 in aberth(&zc)? {
                // a double root of C(x0, ·) comes back as a close pair
                let z0 = polish(&zc, z0);
                if !out.iter().any(|&(a, b)| close(a, x0) && close(b, z0)) {
                    out.push((x0, z0));
                }
            }
        }
    }
    Ok(out)
}

/// `z` exactly when it has degree ≤ 2 over ℚ, from `C(x, z)` with `x`
/// exact: for `x = a + b√d` the norm `C(x, z) C(x̄, z)` is rational.
fn exact_z(comp: &MultiPoly, x: &AlgebraicNumber, approx: Complex64) -> Result<AlgebraicNumber> {
    let numeric = || AlgebraicNumber::Numeric { value: approx, minpoly: MultiPoly::zero(&["z"]) };
    let vars = ["s", "z"];
    let c = comp.with_vars(&CURVE_VARS)?;
    let norm = match x {
        AlgebraicNumber::Rational(r) => {
            c.substitute_one("x", &MultiPoly::constant(&CURVE_VARS, r.clone())).with_vars(&["z"])?
        }
        AlgebraicNumber::Quadratic { a, b, d } => {
            let s = MultiPoly::var(&vars, "s");
            let xs = &MultiPoly::constant(&vars, a.clone()) + &s.scale(b);
            let cz = c.rename("x", "s").with_vars(&vars)?.substitute_one("s", &xs).with_vars(&vars)?;
            let d = MultiPoly::constant(&vars, Rational::from_integer(d.clone()));
            let reduced = crate::algebra::reduce_mod(&cz, &(&(&s * &s) - &d), "s")?;
            let parts = reduced.coeffs_in("s");
            let p0 = parts[0].clone();
            let p1 = parts.get(1).cloned().unwrap_or_else(|| MultiPoly::zero(&vars));
            (&(&p0 * &p0) - &(&(&p1 * &p1) * &d)).with_vars(&["z"])?
        }
        AlgebraicNumber::Numeric { .. } => return Ok(numeric()),
    };
    if !norm.involves("z") {
        return Ok(numeric());
    }
    let (lo, _) = low_degree_factors(&norm, "z")?;
    for g in &lo {
        for r in aberth(&complex_coeffs(g, "z")?)? {
            if close(r, approx) {
                return Ok(AlgebraicNumber::from_factor(g, "z", r)?);
            }
        }
    }
    Ok(numeric())
}

/// Squarefree factors split further into rational pieces of degree ≤ 2.
fn split_factors(ex: &MultiPoly) -> Result<Vec<(MultiPoly, u32)>> {
    let mut out = Vec::new();
    for (g, m) in yun(ex, "x") {
        let (lo, rest) = low_degree_factors(&g, "x")?;
        out.extend(lo.into_iter().map(|f| (f, m)));
        if rest.involves("x") {
            out.push((rest, m));
        }
    }
    Ok(out)
}

fn rat_to_c(r: &Rational) -> Complex64 {
    Complex64::new(crate::algebra::rational::rat_to_f64(r), 0.0)
}

/// `λ`, `b`, the norm and the inequalities between them.
#[derive(Clone, Debug, Serialize)]
pub struct NormComparison {
    pub p: i64,
    pub q: i64,
    pub lambda: u32,
    pub b: u32,
    pub norm: u64,
    /// Zeros of `f_γ` at ideal points.
    pub hat_i: Option<i64>,
    /// Orders of `f_γ` summed over branches above `S(p,q)`.
    pub hat_lambda: Option<i64>,
    /// Orders of `f_γ` summed over all affine zeros.
    pub affine_zeros: Option<i64>,
    pub lambda_le_b: bool,
    pub lambda_le_hat_lambda: Option<bool>,
    pub lambda_plus_hat_i_le_norm: Option<bool>,
    /// Affine zeros plus ideal zeros equal the degree of `f_γ`.
    pub degree_balance: Option<bool>,
    /// Some point of `S(p,q)` has multiplicity above one, so the
    /// inequalities are not guaranteed.
    pub caveat: bool,
}

fn order_sum<'a>(entries: impl Iterator<Item = &'a ChiEntry>) -> Option<i64> {
    let mut total = 0;
    for e in entries {
        if e.branch_orders.is_empty() {
            return None;
        }
        total += e.branch_orders.iter().sum::<i64>();
    }
    Some(total)
}

pub fn compare_with_norm(report: &SurgeryReport, norm: &NormReport) -> NormComparison {
    let s = || report.chi_list.iter().filter(|e| !e.excluded);
    let hat_lambda = order_sum(s());
    let affine_zeros = order_sum(report.chi_list.iter());
    let lambda = report.lambda;
    NormComparison {
        p: report.slope.p,
        q: report.slope.q,
        lambda,
        b: report.b,
        norm: norm.norm,
        hat_i: norm.hat_i,
        hat_lambda,
        affine_zeros,
        lambda_le_b: lambda <= report.b,
        lambda_le_hat_lambda: hat_lambda.map(|h| lambda as i64 <= h),
        lambda_plus_hat_i_le_norm: norm.hat_i.map(|i| lambda as i64 + i <= norm.norm as i64),
        degree_balance: match (affine_zeros, norm.hat_i) {
            (Some(a), Some(i)) => Some(a + i == norm.norm as i64),
            _ => None,
        },
        caveat: s().any(|e| e.multiplicity > 1),
    }
}
