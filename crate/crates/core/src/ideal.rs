//! Projective closure, ideal points, branch expansions, valuations and the
//! Culler–Shalen norm.

use std::fmt;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::gcd::squarefree_part;
use crate::algebra::rational::rat_to_f64;
use crate::algebra::roots::roots;
use crate::algebra::MultiPoly;
use crate::boundary::BoundaryTriple;
use crate::error::{Error, Result};
use crate::puiseux::{branches_at_origin, CPoly2};
use crate::series::Series;

pub const PROJ_VARS: [&str; 3] = ["X", "Y", "Z"];
pub const DEFAULT_ORDER: usize = 12;
pub const MAX_ORDER: usize = 96;
/// Floor for the relative error of computed branch coefficients; the
/// measured residual of the curve equation is used when larger.
const BRANCH_REL_ERR: f64 = 4.0 * f64::EPSILON;

/// Homogeneous model of an affine curve with `(a, b) = (X/Y, Z/Y)`.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectiveCurve {
    pub poly: MultiPoly,
    pub degree: u32,
    pub affine_vars: [String; 2],
}

pub type ProjPoint = [Complex64; 3];

pub fn format_point(p: &ProjPoint) -> String {
    let f = |c: &Complex64| {
        let r = |x: f64| {
            let x = if x.abs() < 1e-9 { 0.0 } else { x };
            let s = format!("{x:.6}");
            let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
            if s == "-0" {
                "0".to_string()
            } else {
                s
            }
        };
        if c.im.abs() < 1e-9 {
            r(c.re)
        } else if c.re.abs() < 1e-9 {
            format!("{}i", r(c.im))
        } else {
            format!("{}{:+}i", r(c.re), c.im)
        }
    };
    format!("[{}:{}:{}]", f(&p[0]), f(&p[1]), f(&p[2]))
}

fn homogenize_with(f: &MultiPoly, degree: u32) -> MultiPoly {
    MultiPoly::from_terms(
        &PROJ_VARS,
        f.terms().map(|(m, c)| {
            let (a, b) = (m.0[0], m.0[1]);
            (vec![a, degree - a - b, b], c.clone())
        }),
    )
}

impl ProjectiveCurve {
    pub fn dehomogenize(&self) -> MultiPoly {
        let vars = [self.affine_vars[0].as_str(), self.affine_vars[1].as_str()];
        MultiPoly::from_terms(
            &vars,
            self.poly.terms().map(|(m, c)| (vec![m.0[0], m.0[2]], c.clone())),
        )
    }

    /// Homogenization of an affine function in the curve's variables, with
    /// its degree.
    pub fn homogenize(&self, f: &MultiPoly) -> Result<(MultiPoly, u32)> {
        let vars = [self.affine_vars[0].as_str(), self.affine_vars[1].as_str()];
        let f = f.with_vars(&vars)?;
        let d = f.total_degree().unwrap_or(0);
        Ok((homogenize_with(&f, d), d))
    }

    pub fn eval(&self, p: &ProjPoint) -> Complex64 {
        self.poly.eval_complex(p)
    }
}

/// Homogenizes a squarefree curve in two variables; the first becomes `X`
/// and the second `Z`.
pub fn projective_closure(f: &MultiPoly) -> Result<ProjectiveCurve> {
    if f.vars().len() != 2 {
        return Err(Error::Input(format!(
            "expected a curve in two variables, got {:?}",
            f.vars()
        )));
    }
    let d = f
        .total_degree()
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::Input("constant polynomial is not a curve".into()))?;
    if squarefree_part(f).total_degree() != Some(d) {
        return Err(Error::Input("curve is not squarefree".into()));
    }
    Ok(ProjectiveCurve {
        poly: homogenize_with(f, d),
        degree: d,
        affine_vars: [f.vars()[0].clone(), f.vars()[1].clone()],
    })
}

fn normalize_point(mut p: ProjPoint) -> ProjPoint {
    let lead = *p.iter().find(|c| c.norm() > 1e-12).expect("nonzero point");
    for c in p.iter_mut() {
        *c /= lead;
        if c.norm() < 1e-13 {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    p
}

/// Points of the closure on the line `Y = 0`.
pub fn ideal_points(pc: &ProjectiveCurve) -> Result<Vec<ProjPoint>> {
    let at_infinity = MultiPoly::from_terms(
        &["X", "Z"],
        pc.poly
            .terms()
            .filter(|(m, _)| m.0[1] == 0)
            .map(|(m, c)| (vec![m.0[0], m.0[2]], c.clone())),
    );
    if at_infinity.is_zero() {
        return Err(Error::Input("degenerate closure: curve contains the line at infinity".into()));
    }
    let mut pts = Vec::new();
    // Z = 1 chart, then [1:0:0] for the missing degree
    let in_x = at_infinity.substitute_one("Z", &MultiPoly::one(&["X", "Z"]));
    let dx = in_x.degree_in("X").unwrap_or(0);
    if dx > 0 {
        for r in roots(&in_x.with_vars(&["X"])?, "X")? {
            pts.push(normalize_point([r.value, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]));
        }
    }
    if dx < pc.degree {
        pts.push([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
    }
    let mut distinct: Vec<ProjPoint> = Vec::new();
    for p in pts {
        if !distinct.iter().any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).norm() < 1e-8)) {
            distinct.push(p);
        }
    }
    Ok(distinct)
}

/// One branch of the closure through a point.
#[derive(Clone, Debug, Serialize)]
pub struct PuiseuxBranch {
    pub center: ProjPoint,
    /// Coordinate set to 1 in the local chart.
    pub chart: usize,
    pub ramification: u32,
    /// Known terms of each coordinate series.
    pub order: usize,
    /// `t = scale · τ`; the coordinate series below are in `τ`.
    pub scale: f64,
    /// Homogeneous coordinates `[X, Y, Z]` as power series in `τ`.
    pub coords: [Vec<Complex64>; 3],
    /// Relative residual of the curve equation on the series.
    pub residual: f64,
}

impl PuiseuxBranch {
    fn coord_series(&self) -> [Series; 3] {
        [0, 1, 2].map(|k| {
            if k == self.chart {
                Series::from_coeffs(0, self.coords[k].clone())
            } else {
                Series::from_coeffs_with_error(0, self.coords[k].clone(), BRANCH_REL_ERR.max(4.0 * self.residual))
            }
        })
    }

    /// Local Puiseux data: the two non-chart coordinates as series in the
    /// first one, `(k/e, coefficient)` pairs.
    pub fn puiseux_terms(&self) -> Vec<(i64, u32, Complex64)> {
        let o = others(self.chart);
        let v = &self.coords[o[1]];
        v.iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| c.norm() > 1e-14)
            .map(|(k, c)| (k as i64, self.ramification, *c * self.scale.powi(k as i32)))
            .collect()
    }

    /// Point on the branch at a small parameter value.
    pub fn point_at(&self, tau: Complex64) -> ProjPoint {
        self.coord_series().map(|s| s.eval(tau))
    }

    /// Laurent series of an affine function `N/D` on the branch.
    pub fn laurent(&self, pc: &ProjectiveCurve, num: &MultiPoly, den: Option<&MultiPoly>) -> Result<Series> {
        let coords = self.coord_series();
        let (nh, dn) = pc.homogenize(num)?;
        let mut s = eval_homogeneous(&nh, &coords, self.order);
        let mut y_power = dn as i64;
        if let Some(d) = den {
            let (dh, dd) = pc.homogenize(d)?;
            let ds = eval_homogeneous(&dh, &coords, self.order);
            s = s.div(&ds).ok_or_else(|| {
                Error::Numeric("denominator vanishes to the truncation order; increase the order".into())
            })?;
            y_power -= dd as i64;
        }
        let y = &coords[1];
        let out = if y_power >= 0 {
            s.div(&y.powi(y_power as u32, self.order))
        } else {
            Some(&s * &y.powi((-y_power) as u32, self.order))
        };
        out.ok_or_else(|| Error::Numeric("chart coordinate vanishes on the branch".into()))
    }
}

fn others(chart: usize) -> [usize; 2] {
    match chart {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

/// Evaluates a homogeneous polynomial in `X, Y, Z` on coordinate series.
pub fn eval_homogeneous(h: &MultiPoly, coords: &[Series; 3], n: usize) -> Series {
    let deg = h.total_degree().unwrap_or(0) as usize;
    let powers: Vec<Vec<Series>> = coords
        .iter()
        .map(|c| {
            let mut v = vec![Series::real(1.0, n)];
            for k in 1..=deg {
                let next = &v[k - 1] * c;
                v.push(next);
            }
            v
        })
        .collect();
    let mut acc: Option<Series> = None;
    for (m, c) in h.terms() {
        let cf = rat_to_f64(c);
        let mut t = Series::real(cf, n);
        if cf.fract() != 0.0 || cf.abs() > 9.0e15 {
            t.err[0] = f64::EPSILON * cf.abs();
        }
        for (k, &e) in m.0.iter().enumerate() {
            if e > 0 {
                t = &t * &powers[k][e as usize];
            }
        }
        acc = Some(match acc {
            None => t,
            Some(a) => &a + &t,
        });
    }
    acc.unwrap_or_else(|| Series::real(0.0, n))
}

/// The closure in the chart around `center`, translated to the origin.
fn local_equation(pc: &ProjectiveCurve, center: &ProjPoint, chart: usize) -> CPoly2 {
    let o = others(chart);
    let mut g = CPoly2::new();
    for (m, c) in pc.poly.terms() {
        let c = rat_to_f64(c);
        let (e1, e2) = (m.0[o[0]], m.0[o[1]]);
        let (p1, p2) = (center[o[0]], center[o[1]]);
        let mut b1 = 1.0;
        for a in 0..=e1 {
            let mut b2 = 1.0;
            let f1 = p1.powu(e1 - a) * b1;
            for b in 0..=e2 {
                let f2 = p2.powu(e2 - b) * b2;
                let coef = f1 * f2 * c;
                g.add_term(a, b, coef, coef.norm());
                b2 = b2 * (e2 - b) as f64 / (b + 1) as f64;
            }
            b1 = b1 * (e1 - a) as f64 / (a + 1) as f64;
        }
    }
    g.cleaned()
}

/// Scale `ρ` for `t = ρ·τ`-free series: every coordinate series, divided by
/// its leading term, gets an absolute tail sum of at most 1/4 in `τ`. This
/// keeps the magnitude bounds of products and inverses close to the values.
fn parameter_scale(series: &[&Vec<Complex64>], offsets: [Complex64; 2]) -> f64 {
    let mut rho: f64 = 1.0;
    for (s, off) in series.iter().zip(offsets) {
        let mut c: Vec<Complex64> = s.to_vec();
        c[0] += off;
        let Some(k0) = c.iter().position(|z| z.norm() > 0.0) else { continue };
        let lead = c[k0].norm();
        let tail = |r: f64| -> f64 {
            c.iter()
                .enumerate()
                .skip(k0 + 1)
                .map(|(k, z)| z.norm() / lead * r.powi(-((k - k0) as i32)))
                .sum()
        };
        for _ in 0..400 {
            if tail(rho) <= 0.25 {
                break;
            }
            rho *= 1.1;
        }
    }
    rho
}

/// All branches of the closure through `point`, each with `order` terms.
pub fn branch_expansions(pc: &ProjectiveCurve, point: &ProjPoint, order: usize) -> Result<Vec<PuiseuxBranch>> {
    let order = order.max(2);
    let (chart, _) = point
        .iter()
        .enumerate()
        .map(|(k, c)| (k, c.norm()))
        .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let center = point.map(|c| c / point[chart]);
    let scale_val = pc.eval(&center).norm() / (1.0 + pc.poly.eval_abs_scale(&center));
    if scale_val > 1e-8 {
        return Err(Error::Input(format!("{} is not on the curve", format_point(point))));
    }
    let g = local_equation(pc, &center, chart);
    let o = others(chart);
    let mut out = Vec::new();
    for lb in branches_at_origin(&g, order)? {
        let rho = parameter_scale(&[&lb.u, &lb.v], [center[o[0]], center[o[1]]]);
        let rescale = |s: &[Complex64]| -> Vec<Complex64> {
            s.iter()
                .enumerate()
                .map(|(k, c)| c * rho.powi(-(k as i32)))
                .collect()
        };
        let mut coords: [Vec<Complex64>; 3] = Default::default();
        coords[chart] = {
            let mut one = vec![Complex64::new(0.0, 0.0); order];
            one[0] = Complex64::new(1.0, 0.0);
            one
        };
        let mut u = rescale(&lb.u);
        u[0] += center[o[0]];
        let mut v = rescale(&lb.v);
        v[0] += center[o[1]];
        coords[o[0]] = u;
        coords[o[1]] = v;
        let mut br = PuiseuxBranch {
            center,
            chart,
            ramification: lb.e.max(1),
            order,
            scale: rho,
            coords,
            residual: 0.0,
        };
        let cs = br.coord_series();
        let s = eval_homogeneous(&pc.poly, &cs, order);
        let abs_poly = MultiPoly::from_terms(
            &PROJ_VARS,
            pc.poly.terms().map(|(m, c)| (m.0.clone(), num_traits::Signed::abs(c))),
        );
        let mag = eval_homogeneous(&abs_poly, &cs.each_ref().map(|c| c.abs()), order);
        br.residual = (0..s.len())
            .map(|k| {
                let idx = s.val + k as i64 - mag.val;
                let m = if idx >= 0 && (idx as usize) < mag.len() { mag.coeffs[idx as usize].re } else { 0.0 };
                if m > 0.0 {
                    s.coeffs[k].norm() / m
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);
        if br.residual > 1e-8 {
            return Err(Error::Numeric(format!(
                "branch at {} has residual {:.1e}",
                format_point(point),
                br.residual
            )));
        }
        out.push(br);
    }
    Ok(out)
}

/// Order of `N/D` along a branch in its uniformizer (negative for poles).
pub fn valuation(
    pc: &ProjectiveCurve,
    branch: &PuiseuxBranch,
    num: &MultiPoly,
    den: Option<&MultiPoly>,
) -> Result<i64> {
    if num.is_zero() {
        return Err(Error::Input("valuation of the zero function".into()));
    }
    branch
        .laurent(pc, num, den)?
        .valuation()
        .ok_or_else(|| Error::Numeric("cancellation to the truncation order; increase the order".into()))
}

/// Valuation with automatic order doubling up to `max_order`.
pub fn valuation_adaptive(
    pc: &ProjectiveCurve,
    point: &ProjPoint,
    branch_index: usize,
    num: &MultiPoly,
    den: Option<&MultiPoly>,
    max_order: usize,
) -> Result<i64> {
    let mut order = DEFAULT_ORDER;
    loop {
        let branches = branch_expansions(pc, point, order)?;
        let b = branches
            .get(branch_index)
            .ok_or_else(|| Error::Input(format!("no branch {branch_index}")))?;
        match valuation(pc, b, num, den) {
            Ok(v) => return Ok(v),
            Err(Error::Numeric(msg)) if order < max_order => {
                let _ = msg;
                order = (order * 2).min(max_order);
            }
            Err(e) => return Err(e),
        }
    }
}

/// `(-1)^{v(f)v(g)} f^{v(g)} / g^{v(f)}` at the branch centre.
pub fn tame_symbol(
    pc: &ProjectiveCurve,
    branch: &PuiseuxBranch,
    f: (&MultiPoly, Option<&MultiPoly>),
    g: (&MultiPoly, Option<&MultiPoly>),
) -> Result<Complex64> {
    let trunc = || Error::Numeric("cancellation to the truncation order; increase the order".into());
    let fs = branch.laurent(pc, f.0, f.1)?;
    let gs = branch.laurent(pc, g.0, g.1)?;
    let (vf, lf) = fs.leading().ok_or_else(trunc)?;
    let (vg, lg) = gs.leading().ok_or_else(trunc)?;
    let sign = if (vf * vg).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(lf.powi(vg as i32) / lg.powi(vf as i32) * sign)
}

/// Valuations of the boundary traces at one ideal branch.
#[derive(Clone, Debug, Serialize)]
pub struct IdealBranchData {
    pub point: String,
    pub branch: usize,
    pub ramification: u32,
    pub v_mu: i64,
    pub v_lambda: i64,
    pub v_mulambda: i64,
    /// Pole orders of `I_μ`, `I_λ`.
    pub a: i64,
    pub b: i64,
    /// Relative sign of the μ and λ weights read from `I_μλ`, if forced.
    pub forced_sign: Option<i32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointContribution {
    pub point: String,
    pub branch: usize,
    /// `φ_x(γ) = 2(p·a + s·q·b)`.
    pub phi: i64,
    /// `v(f_γ)` computed directly from the series, when requested.
    pub direct: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub p: i64,
    pub q: i64,
    pub norm: u64,
    pub contributions: Vec<PointContribution>,
    /// Total order of zeros of `f_γ` at ideal points, when computed directly.
    pub hat_i: Option<i64>,
}

struct DirectCache {
    n: usize,
    /// Laurent series of `(I_μ, I_λ, I_μλ)` per ideal branch.
    series: Vec<[Series; 3]>,
}

/// Everything needed to evaluate the norm of a component.
pub struct NormContext {
    pub curve: ProjectiveCurve,
    pub triple: BoundaryTriple,
    pub points: Vec<ProjPoint>,
    pub data: Vec<IdealBranchData>,
    /// Resolved relative sign per ideal branch.
    pub signs: Vec<i32>,
    branch_refs: Vec<(usize, usize)>,
    cache: Mutex<Option<DirectCache>>,
}

impl fmt::Debug for NormContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NormContext").field("data", &self.data).field("signs", &self.signs).finish()
    }
}

fn pole(v: i64) -> i64 {
    (-v).max(0)
}

/// Picks a sign per branch so that the functionals `(a_i, s_i b_i)` have no
/// common kernel vector; forced signs are kept, ties go to the smallest sign
/// vector in lexicographic order.
pub fn resolve_signs(data: &[IdealBranchData]) -> Result<Vec<i32>> {
    let k = data.len();
    if k > 20 {
        return Err(Error::Numeric("too many ideal branches for sign resolution".into()));
    }
    for mask in 0u32..(1 << k) {
        // bit set = +1; iterate so that -1 < +1 lexicographically
        let signs: Vec<i32> = (0..k)
            .map(|i| if mask >> (k - 1 - i) & 1 == 1 { 1 } else { -1 })
            .collect();
        if data
            .iter()
            .zip(&signs)
            .any(|(d, s)| d.forced_sign.map_or(false, |f| f != *s))
        {
            continue;
        }
        let rows: Vec<(i64, i64)> = data.iter().zip(&signs).map(|(d, s)| (d.a, *s as i64 * d.b)).collect();
        let rank2 = rows
            .iter()
            .enumerate()
            .any(|(i, r)| rows[i + 1..].iter().any(|t| r.0 * t.1 - r.1 * t.0 != 0));
        if rank2 {
            return Ok(signs);
        }
    }
    let diag: Vec<String> = data
        .iter()
        .map(|d| format!("{}: a={} b={} forced={:?}", d.point, d.a, d.b, d.forced_sign))
        .collect();
    Err(Error::Numeric(format!(
        "no sign assignment makes the Culler-Shalen function a norm ({})",
        diag.join("; ")
    )))
}

impl NormContext {
    pub fn new(triple: &BoundaryTriple) -> Result<Self> {
        let curve = projective_closure(&triple.modulus)?;
        let points = ideal_points(&curve)?;
        let mut data = Vec::new();
        let mut branch_refs = Vec::new();
        for (pi, pt) in points.iter().enumerate() {
            let nb = branch_expansions(&curve, pt, DEFAULT_ORDER)?.len();
            for bi in 0..nb {
                let v = |f: &MultiPoly| valuation_adaptive(&curve, pt, bi, f, None, MAX_ORDER);
                let v_mu = v(&triple.i_mu)?;
                let v_lambda = v(&triple.i_lambda)?;
                let v_mulambda = v(&triple.i_mulambda)?;
                let (a, b, c) = (pole(v_mu), pole(v_lambda), pole(v_mulambda));
                let forced_sign = if a == 0 || b == 0 {
                    None
                } else if c == a + b {
                    Some(1)
                } else if c == (a - b).abs() {
                    Some(-1)
                } else {
                    return Err(Error::Verification(format!(
                        "I_μλ has pole order {c} at {}, inconsistent with {a} and {b}",
                        format_point(pt)
                    )));
                };
                data.push(IdealBranchData {
                    point: format_point(pt),
                    branch: bi,
                    ramification: 1,
                    v_mu,
                    v_lambda,
                    v_mulambda,
                    a,
                    b,
                    forced_sign,
                });
                branch_refs.push((pi, bi));
            }
        }
        let signs = resolve_signs(&data)?;
        Ok(NormContext { curve, triple: triple.clone(), points, data, signs, branch_refs, cache: Mutex::new(None) })
    }

    /// `Σ |φ_x(γ)|` over ideal branches.
    pub fn norm(&self, p: i64, q: i64) -> Result<NormReport> {
        if p == 0 && q == 0 {
            return Err(Error::Input("slope (0,0)".into()));
        }
        let contributions: Vec<PointContribution> = self
            .data
            .iter()
            .zip(&self.signs)
            .map(|(d, s)| PointContribution {
                point: d.point.clone(),
                branch: d.branch,
                phi: 2 * (p * d.a + *s as i64 * q * d.b),
                direct: None,
            })
            .collect();
        let norm = contributions.iter().map(|c| c.phi.unsigned_abs()).sum();
        Ok(NormReport { p, q, norm, contributions, hat_i: None })
    }

    /// Norm plus direct valuations of `f_γ = I_γ² - 4` at every ideal
    /// branch, evaluated on the series.
    pub fn norm_with_direct(&self, p: i64, q: i64) -> Result<NormReport> {
        let mut rep = self.norm(p, q)?;
        let direct = self.direct_valuations(p, q)?;
        let mut hat = 0;
        for (c, v) in rep.contributions.iter_mut().zip(direct) {
            c.direct = Some(v);
            hat += v.max(0);
        }
        rep.hat_i = Some(hat);
        Ok(rep)
    }

    fn ensure_cache(&self, n: usize) -> Result<()> {
        let mut guard = self.cache.lock().unwrap();
        if guard.as_ref().map_or(false, |c| c.n >= n) {
            return Ok(());
        }
        let mut series = Vec::new();
        for &(pi, bi) in &self.branch_refs {
            let branches = branch_expansions(&self.curve, &self.points[pi], n)?;
            let b = &branches[bi];
            let t = &self.triple;
            series.push([
                b.laurent(&self.curve, &t.i_mu, None)?,
                b.laurent(&self.curve, &t.i_lambda, None)?,
                b.laurent(&self.curve, &t.i_mulambda, None)?,
            ]);
        }
        *guard = Some(DirectCache { n, series });
        Ok(())
    }

    /// `v(f_γ)` per ideal branch from `tr(M^p L^q)` evaluated on series.
    pub fn direct_valuations(&self, p: i64, q: i64) -> Result<Vec<i64>> {
        let max_pole = self
            .data
            .iter()
            .map(|d| p.abs() * d.a + q.abs() * d.b)
            .max()
            .unwrap_or(0) as usize;
        let mut n = 2 * max_pole + DEFAULT_ORDER;
        loop {
            self.ensure_cache(n)?;
            let guard = self.cache.lock().unwrap();
            let cache = guard.as_ref().unwrap();
            let mut out = Vec::new();
            let mut short = false;
            for s in &cache.series {
                let f = match eigen_gamma(s, p, q, cache.n) {
                    Some(d) => &d * &d,
                    None => {
                        let ig = peripheral_series(s, p, q, cache.n);
                        &(&ig * &ig) - &Series::real(4.0, cache.n)
                    }
                };
                match f.valuation() {
                    Some(v) => out.push(v),
                    None => {
                        short = true;
                        break;
                    }
                }
            }
            if !short {
                return Ok(out);
            }
            if n >= 8 * MAX_ORDER + 2 * max_pole {
                return Err(Error::Numeric(format!(
                    "f_γ for ({p},{q}) cancels to the truncation order {n}"
                )));
            }
            n *= 2;
        }
    }
}

/// An eigenvalue of a matrix with trace `tr`: the root of `M² - tr·M + 1`
/// with the smaller valuation. `None` when it would need ramification.
pub fn eigen_series(tr: &Series, n: usize) -> Option<Series> {
    let disc = &(tr * tr) - &Series::real(4.0, n);
    let root = disc.sqrt()?;
    let plus = (tr + &root).scale(Complex64::new(0.5, 0.0));
    let minus = (tr - &root).scale(Complex64::new(0.5, 0.0));
    match (plus.valuation(), minus.valuation()) {
        (Some(a), Some(b)) if b < a => Some(minus),
        (Some(_), _) => Some(plus),
        (None, Some(_)) => Some(minus),
        (None, None) => None,
    }
}

/// `W - 1/W` for `W = M^p L^q` with `M, L` eigenvalue series whose product
/// has trace `I_μλ`; its square is `f_γ`.
fn eigen_gamma(s: &[Series; 3], p: i64, q: i64, n: usize) -> Option<Series> {
    let m = eigen_series(&s[0], n)?;
    let l = eigen_series(&s[1], n)?;
    let defect = |l: &Series| -> Option<i64> {
        let ml = &m * l;
        let d = &(&ml + &ml.inverse()?) - &s[2];
        // all negligible means the identity holds to the known precision
        Some(d.valuation().unwrap_or(i64::MAX))
    };
    let l_inv = l.inverse()?;
    let l = match (defect(&l)?, defect(&l_inv)?) {
        (a, b) if a == b => return None,
        (a, b) if a > b => l,
        _ => l_inv,
    };
    let w = &m.powi_signed(p, n)? * &l.powi_signed(q, n)?;
    Some(&w - &w.inverse()?)
}

/// `tr(M^p L^q)` for commuting `M, L` from `tr M`, `tr L`, `tr ML`.
pub fn peripheral_series(s: &[Series; 3], p: i64, q: i64, n: usize) -> Series {
    let (p, q) = if p < 0 { (-p, -q) } else { (p, q) };
    let two = Series::real(2.0, n);
    // t(0, k) = tr L^k and t(1, k) = tr M L^k by the Chebyshev recursion in k
    let step_k = |t0: Series, t1: Series, k: i64| -> Series {
        let (mut a, mut b) = (t0, t1);
        if k == 0 {
            return a;
        }
        for _ in 1..k.abs() {
            let next = &(&b * &s[1]) - &a;
            a = b;
            b = next;
        }
        b
    };
    let tl = |k: i64| step_k(two.clone(), s[1].clone(), k);
    let tml = |k: i64| {
        if k >= 0 {
            step_k(s[0].clone(), s[2].clone(), k)
        } else {
            // tr(M L^{-1}) = tr M tr L - tr ML
            let ml_inv = &(&s[0] * &s[1]) - &s[2];
            step_k(s[0].clone(), ml_inv, k)
        }
    };
    if p == 0 {
        return tl(q);
    }
    let (mut a, mut b) = (tl(q), tml(q));
    for _ in 1..p {
        let next = &(&b * &s[0]) - &a;
        a = b;
        b = next;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    #[test]
    fn closure_of_fig8_component() {
        let f = parse_poly("z^2 - (1 + x^2)*z + 2*x^2 - 1", &["x", "z"]).unwrap();
        let pc = projective_closure(&f).unwrap();
        let expected = parse_poly("Y*Z^2 - Y^2*Z - X^2*Z + 2*X^2*Y - Y^3", &PROJ_VARS).unwrap();
        assert!(pc.poly == expected || pc.poly == -&expected);
        assert_eq!(pc.dehomogenize(), f);
    }

    #[test]
    fn circle_ideal_points() {
        let f = parse_poly("x^2 + z^2 - 1", &["x", "z"]).unwrap();
        let pts = ideal_points(&projective_closure(&f).unwrap()).unwrap();
        assert_eq!(pts.len(), 2);
        for p in &pts {
            assert!((p[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!((p[2].norm() - 1.0).abs() < 1e-12 && p[2].re.abs() < 1e-12);
        }
    }

    #[test]
    fn peripheral_series_matches_closed_form() {
        let m = Complex64::new(1.3, 0.4);
        let l = Complex64::new(-0.7, 0.9);
        let s = [m + m.inv(), l + l.inv(), m * l + (m * l).inv()].map(|c| Series::constant(c, 1));
        for (p, q) in [(0, 1), (1, 0), (3, 1), (-2, 5), (4, -3), (0, -2)] {
            let got = peripheral_series(&s, p, q, 1).coeffs[0];
            let mono = m.powi(p as i32) * l.powi(q as i32);
            assert!((got - (mono + mono.inv())).norm() < 1e-10, "{p} {q}");
        }
    }

    #[test]
    fn node_tame_symbol_and_line_branch() {
        let f = parse_poly("z - x", &["x", "z"]).unwrap();
        let pc = projective_closure(&f).unwrap();
        let pt = [Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)];
        let b = branch_expansions(&pc, &pt, 8).unwrap();
        assert_eq!(b.len(), 1);
        let x = MultiPoly::var(&["x", "z"], "x");
        let one_minus = &MultiPoly::one(&["x", "z"]) - &x;
        let t = tame_symbol(&pc, &b[0], (&x, None), (&one_minus, None)).unwrap();
        assert!((t - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
