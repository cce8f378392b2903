//! The acceptance checks, run against a knot preset.
//!
//! Every check reports pass or fail with a one-line detail. The exact
//! anchors (trace identities aside) are known for the figure-eight knot
//! only; on other presets those checks are skipped and the structural
//! ones still run.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::rational::rat;
use crate::algebra::{parse_poly, MultiPoly, Rational};
use crate::boundary::{
    a_polynomial, is_sigma_symmetric, point_test, restriction_map, surface_residual, t_d, BoundaryTriple, APOLY_VARS,
};
use crate::charvar::{defining_polynomial, is_smooth, reducible_characters, PlaneCurve, ReducibleCharacter, CURVE_VARS};
use crate::error::{Error, Result};
use crate::ideal::{
    branch_expansions, ideal_points, projective_closure, tame_symbol, valuation, valuation_adaptive, NormContext, DEFAULT_ORDER,
    MAX_ORDER,
};
use crate::knot::KnotPresentation;
use crate::regulator::track::track_numeric;
use crate::regulator::{close_circle, detect_rational, holonomy, integrate_forms, loop_library, CurveFunction, NumCurve};
use crate::surgery::{compare_with_norm, SurgeryContext, SurgeryReport, SurgerySlope};
use crate::trace::{specialize_conjugate, TraceEngine};
use crate::word::GroupWord;

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Bound on `|∫η|` and on the distance of `∫ξ/4π²` to a rational.
    pub loop_tol: f64,
    pub max_den: u64,
    pub loops: usize,
    /// Samples per turn at the coarsest level; refined 2× and 4×.
    pub resolution: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 1, loop_tol: 1e-6, max_den: 64, loops: 6, resolution: 512 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// The pipeline up to the A-polynomial, shared by the checks.
struct Pipeline {
    pres: KnotPresentation,
    curve: PlaneCurve,
    triple: BoundaryTriple,
    apoly: MultiPoly,
    reducible: Vec<ReducibleCharacter>,
}

impl Pipeline {
    fn new(pres: &KnotPresentation, seed: u64) -> Result<Self> {
        let engine = TraceEngine::new();
        let curve = defining_polynomial(&engine, pres, seed)?;
        let comp = curve.nonabelian()?.clone();
        let triple = restriction_map(&engine, &comp, pres)?;
        let apoly = a_polynomial(&triple)?.poly;
        let reducible = reducible_characters(&comp, &pres.alexander)?;
        Ok(Pipeline { pres: pres.clone(), curve, triple, apoly, reducible })
    }

    fn is_fig8(&self) -> bool {
        self.pres.name == "fig8"
    }
}

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

const NAMES: [&str; 11] = [
    "trace identities",
    "character variety",
    "restriction map",
    "t_D membership",
    "ideal points and norms",
    "surgery anchors",
    "norm comparison",
    "A-polynomial consistency",
    "loop exactness and quantization",
    "holonomy identities",
    "non-reproducible constants",
];

/// Runs every check; a pipeline failure turns the dependent checks into
/// failures rather than aborting.
pub fn run_checks(pres: &KnotPresentation, cfg: &VerifyConfig) -> Vec<CheckResult> {
    let t0 = Instant::now();
    let pipeline = Pipeline::new(pres, cfg.seed);
    let setup = t0.elapsed().as_secs_f64();
    let mut out = Vec::new();
    for id in 1..=11u32 {
        let start = Instant::now();
        let outcome = match (&pipeline, id) {
            (_, 1) => check_traces(),
            (_, 11) => check_documented(pres),
            (Ok(p), _) => run_one(p, id, cfg).unwrap_or_else(|e| Outcome::Fail(format!("error: {e}"))),
            (Err(e), _) => Outcome::Fail(format!("pipeline failed: {e}")),
        };
        let mut seconds = start.elapsed().as_secs_f64();
        if id == 2 {
            seconds += setup;
        }
        let (status, detail) = match outcome {
            Outcome::Pass(d) => (Status::Pass, d),
            Outcome::Fail(d) => (Status::Fail, d),
            Outcome::Skip(d) => (Status::Skipped, d),
        };
        out.push(CheckResult { id, name: NAMES[id as usize - 1], status, detail, seconds });
    }
    out
}

fn run_one(p: &Pipeline, id: u32, cfg: &VerifyConfig) -> Result<Outcome> {
    match id {
        2 => check_charvar(p),
        3 => check_restriction(p),
        4 => check_t_d(cfg.seed),
        5 => check_norms(p),
        6 => check_surgery(p),
        7 => check_norm_comparison(p),
        8 => check_apoly(p, cfg.seed),
        9 => check_loops(p, cfg),
        10 => check_holonomy(p),
        _ => unreachable!(),
    }
}

/// `(word, σ(word) at y = x)`.
pub const TRACE_IDENTITIES: [(&str, &str); 15] = [
    ("aa", "x^2 - 2"),
    ("Ab", "x^2 - z"),
    ("bA", "x^2 - z"),
    ("Ba", "x^2 - z"),
    ("aB", "x^2 - z"),
    ("BabA", "z^2 - x^2*z + 2*x^2 - 2"),
    ("AbaB", "z^2 - x^2*z + 2*x^2 - 2"),
    ("AAb", "x*(x^2 - z) - x"),
    ("bAAb", "x^4 - z*x^2 - 2*x^2 + 2"),
    ("bAAbaB", "x^2 - z"),
    ("aBa", "x^3 - z*x - x"),
    ("aaB", "x^3 - z*x - x"),
    ("aab", "x*z - x"),
    ("aBabA", "x"),
    ("", "2"),
];

fn check_traces() -> Outcome {
    let engine = TraceEngine::new();
    let mut bad = Vec::new();
    for (w, want) in TRACE_IDENTITIES {
        let got = GroupWord::parse(w)
            .and_then(|w| engine.trace_poly(&w))
            .map(|p| specialize_conjugate(&p));
        let want = parse_poly(want, &CURVE_VARS).expect("identity parses");
        match got {
            Ok(g) if g == want => {}
            Ok(g) => bad.push(format!("σ({w}) = {g}")),
            Err(e) => bad.push(format!("σ({w}): {e}")),
        }
    }
    verdict(bad.is_empty(), if bad.is_empty() { format!("{} words exact", TRACE_IDENTITIES.len()) } else { bad.join("; ") })
}

fn check_charvar(p: &Pipeline) -> Result<Outcome> {
    let comp = p.curve.nonabelian()?;
    let smooth = is_smooth(comp)?;
    if !p.is_fig8() {
        return Ok(Outcome::Skip(format!("f = {}; smooth: {smooth}; no anchor for {}", p.curve.poly, p.pres.name)));
    }
    let want = parse_poly("(x^2 - z - 2)*(z^2 - (1 + x^2)*z + 2*x^2 - 1)", &CURVE_VARS)?.normalized();
    let poly_ok = p.curve.poly.normalized() == want;
    let red_ok = p.reducible.len() == 2
        && p.reducible.iter().all(|r| {
            let x = r.x.to_complex();
            let z = r.z.to_complex();
            r.exact
                && r.multiplicity == 2
                && z.re == 3.0
                && z.im == 0.0
                && r.x.as_quadratic().is_some_and(|(q, d)| q.a.is_zero() && q.b.abs() == rat(1, 1) && d == 5.into())
                && x.im == 0.0
        })
        && p.reducible[0].x.to_complex().re * p.reducible[1].x.to_complex().re < 0.0;
    let reds: Vec<String> = p.reducible.iter().map(|r| format!("({}, {}) mult {}", r.x, r.z, r.multiplicity)).collect();
    Ok(verdict(
        poly_ok && smooth && red_ok,
        format!("f = {}; nonabelian factor smooth: {smooth}; reducible: {}", p.curve.poly, reds.join(", ")),
    ))
}

fn check_restriction(p: &Pipeline) -> Result<Outcome> {
    let defect = p.triple.surface_defect()?;
    let detail = format!("F = {}; G = {}; surface defect = {defect}", p.triple.i_lambda, p.triple.i_mulambda);
    if !p.is_fig8() {
        return Ok(verdict(defect.is_zero(), detail));
    }
    let f = parse_poly("x^4 - 5*x^2 + 2", &CURVE_VARS)?;
    let g = parse_poly("(4*x - x^3)*z + x^5 - 4*x^3 - x", &CURVE_VARS)?;
    Ok(verdict(defect.is_zero() && p.triple.i_lambda == f && p.triple.i_mulambda == g, detail))
}

/// `m + 1/m` over the rationals.
fn sym(m: &Rational) -> Rational {
    m + m.recip()
}

fn check_t_d(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7d);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let mut c = || Complex64::from_polar(rng.gen_range(0.2..5.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let (m, l) = (c(), c());
        let [x, y, z] = t_d(m, l)?;
        let scale = 1.0 + x.norm().powi(2) + y.norm().powi(2) + z.norm().powi(2) + (x * y * z).norm();
        worst = worst.max(surface_residual(x, y, z).norm() / scale);
    }
    // the σ-invariance in exact arithmetic
    let mut sym_ok = true;
    for _ in 0..200 {
        let mut r = || rat(rng.gen_range(1..1000) * if rng.gen() { 1 } else { -1 }, rng.gen_range(1..1000));
        let (m, l) = (r(), r());
        let ml = &m * &l;
        let (mi, li) = (m.recip(), l.recip());
        let mli = &mi * &li;
        sym_ok &= sym(&m) == sym(&mi) && sym(&l) == sym(&li) && sym(&ml) == sym(&mli);
        let (x, y, z) = (sym(&m), sym(&l), sym(&ml));
        let exact = &x * &x + &y * &y + &z * &z - &x * &y * &z - rat(4, 1);
        sym_ok &= exact.is_zero();
    }
    Ok(verdict(
        worst < 1e-9 && sym_ok,
        format!("1000 points, max scaled residual {worst:.2e}; exact σ-invariance: {sym_ok}"),
    ))
}

fn check_norms(p: &Pipeline) -> Result<Outcome> {
    if !p.is_fig8() {
        return Ok(Outcome::Skip(match NormContext::new(&p.triple) {
            Ok(ctx) => format!("{} ideal branches; no anchor for {}", ctx.data.len(), p.pres.name),
            Err(e) => format!("{e}; no anchor for {}", p.pres.name),
        }));
    }
    let ctx = NormContext::new(&p.triple)?;
    let mut names: Vec<&str> = ctx.data.iter().map(|d| d.point.as_str()).collect();
    names.sort();
    names.dedup();
    let pc = projective_closure(p.curve.nonabelian()?)?;
    let f_alpha = parse_poly("x^2 - 4", &CURVE_VARS)?;
    let f_lambda = &(&p.triple.i_lambda * &p.triple.i_lambda) - &MultiPoly::from_int(&CURVE_VARS, 4);
    let mut orders = Vec::new();
    for pt in ideal_points(&pc)? {
        for i in 0..branch_expansions(&pc, &pt, DEFAULT_ORDER)?.len() {
            let v = |f: &MultiPoly| valuation_adaptive(&pc, &pt, i, f, None, MAX_ORDER);
            orders.push((-v(&f_alpha)?, -v(&f_lambda)?));
        }
    }
    let poles_ok = orders == [(2, 8), (2, 8)];
    let mut bad = Vec::new();
    let mut count = 0;
    for a in -10i64..=10 {
        for b in 0i64..=10 {
            if a.gcd(&b) != 1 || (b == 0 && a < 0) {
                continue;
            }
            count += 1;
            let want = 2 * ((a + 4 * b).abs() + (a - 4 * b).abs()) as u64;
            let got = ctx.norm(a, b)?.norm;
            if got != want {
                bad.push(format!("|({a},{b})| = {got}, expected {want}"));
            }
        }
    }
    let (n10, n01) = (ctx.norm(1, 0)?.norm, ctx.norm(0, 1)?.norm);
    Ok(verdict(
        names == ["[0:0:1]", "[1:0:0]"] && poles_ok && bad.is_empty(),
        format!(
            "ideal points {names:?}; pole orders (f_α, f_λ) {orders:?}; |(1,0)| = {n10}, |(0,1)| = {n01}; {count} slopes{}",
            if bad.is_empty() { String::new() } else { format!("; {}", bad.join(", ")) }
        ),
    ))
}

fn surgery_context(p: &Pipeline) -> Result<SurgeryContext> {
    SurgeryContext::new(&p.triple, p.reducible.clone())
}

fn xs_match(got: &[Complex64], want: &[f64]) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(g, w)| (g - w).norm() < 1e-9)
}

fn multiplicity_key(r: &SurgeryReport) -> Vec<(i32, String, u32)> {
    r.chi_list.iter().map(|e| (e.trace, format!("{:.8}", e.x.to_complex()), e.multiplicity)).collect()
}

fn check_surgery(p: &Pipeline) -> Result<Outcome> {
    if !p.is_fig8() {
        return Ok(Outcome::Skip(format!("no surgery anchors for {}", p.pres.name)));
    }
    let ctx = surgery_context(p)?;
    let mut notes = Vec::new();
    let mut ok = true;
    for (a, b) in [(3, 1), (0, 1), (1, 0)] {
        let slope = SurgerySlope::new(a, b)?;
        let reports: Vec<SurgeryReport> = (0..5).map(|s| ctx.intersection_set(slope, s)).collect::<Result<_>>()?;
        let r = &reports[0];
        let stable = reports.iter().all(|o| multiplicity_key(o) == multiplicity_key(r));
        let total: u32 = r.chi_list.iter().map(|e| e.multiplicity).sum();
        let anchor = match (a, b) {
            (3, 1) => {
                let s2 = 2f64.sqrt();
                let target = parse_poly("x^2 - 2*x - 1", &["x"])?.normalized();
                xs_match(&r.x_values(2), &[1.0 - s2, 1.0, 1.0 + s2])
                    && r.eliminants.iter().any(|e| e.trace == 2 && e.factors.iter().any(|(f, m)| *f == target && *m >= 2))
            }
            (0, 1) => {
                let s5 = 5f64.sqrt();
                xs_match(&r.x_values(2), &[-s5, 0.0, s5])
                    && r.chi_list.iter().filter(|e| e.trace == 2 && !e.excluded).all(|e| {
                        let x = e.x.to_complex().re;
                        e.reducible == (x.abs() > 1.0) && (!e.reducible || (e.z.to_complex() - 3.0).norm() < 1e-12)
                    })
            }
            _ => r.lambda == 0 && r.b >= 1,
        };
        ok &= anchor && stable;
        notes.push(format!(
            "({a},{b}): anchor {anchor}, λ = {}, b = {}, total multiplicity {total}, stable over 5 seeds: {stable}",
            r.lambda, r.b
        ));
    }
    Ok(verdict(ok, notes.join("; ")))
}

fn check_norm_comparison(p: &Pipeline) -> Result<Outcome> {
    if !p.is_fig8() {
        return Ok(Outcome::Skip(format!("the comparison is run on fig8 only, not {}", p.pres.name)));
    }
    let ctx = surgery_context(p)?;
    let norms = NormContext::new(&p.triple)?;
    let mut bad = Vec::new();
    let mut count = 0;
    let mut caveat = 0;
    for a in -5i64..=5 {
        for b in 0i64..=5 {
            if a.gcd(&b) != 1 || (b == 0 && a < 0) {
                continue;
            }
            count += 1;
            let r = ctx.intersection_set(SurgerySlope::new(a, b)?, 3)?;
            let n = norms.norm_with_direct(a, b)?;
            let c = compare_with_norm(&r, &n);
            if c.caveat {
                caveat += 1;
            }
            // checked even where multiplicities exceed one
            let ineq = c.lambda_plus_hat_i_le_norm == Some(true) && c.degree_balance == Some(true);
            if !c.lambda_le_b || !ineq {
                bad.push(format!("({a},{b}): λ = {}, b = {}, ‖γ‖ = {}", c.lambda, c.b, c.norm));
            }
        }
    }
    Ok(verdict(
        bad.is_empty(),
        format!(
            "{count} slopes; λ ≤ b, λ + Î ≤ ‖γ‖ and degree balance checked on all, {caveat} with multiplicities above 1{}",
            if bad.is_empty() { String::new() } else { format!("; failures: {}", bad.join(", ")) }
        ),
    ))
}

fn check_apoly(p: &Pipeline, seed: u64) -> Result<Outcome> {
    let a = &p.apoly;
    let pt = point_test(&p.triple, a, 50, seed)?;
    let symmetric = is_sigma_symmetric(a);
    let at = a.with_vars(&APOLY_VARS)?.eval_rational(&[rat(1, 1), rat(-1, 1)]);
    let mut detail = format!(
        "A₀ = {a}; max relative residual {:.2e}; σ-symmetric: {symmetric}; A₀(1,-1) = {at}",
        pt.max_relative_residual
    );
    let mut ok = pt.max_relative_residual < 1e-7 && symmetric && at.is_zero();
    if p.is_fig8() {
        let want = parse_poly("l^2*m^4 - l*(m^8 - m^6 - 2*m^4 - m^2 + 1) + m^4", &APOLY_VARS)?.normalized();
        let same = *a == want;
        ok &= same;
        detail.push_str(&format!("; matches the closed form: {same}"));
    }
    Ok(verdict(ok, detail))
}

fn check_loops(p: &Pipeline, cfg: &VerifyConfig) -> Result<Outcome> {
    let nc = NumCurve::new(&p.apoly)?;
    let loops = loop_library(&p.apoly, cfg.loops, cfg.resolution)?;
    // fig8 has enough critical values for four distinct loops
    let mut ok = loops.len() >= if p.is_fig8() { 4 } else { 1 };
    let mut notes = vec![format!("{} loops", loops.len())];
    for lp in &loops {
        let mut detected = Vec::new();
        let mut max_eta: f64 = 0.0;
        for factor in [1, 2, 4] {
            let path = track_numeric(&nc, &lp.path_spec(cfg.resolution * factor))?;
            let f = integrate_forms(&path);
            max_eta = max_eta.max(f.eta.abs());
            detected.push(detect_rational(f.xi / (4.0 * PI * PI), cfg.max_den, cfg.loop_tol));
        }
        let stable = detected[0].is_some() && detected.iter().all(|d| *d == detected[0]);
        ok &= max_eta < cfg.loop_tol && stable;
        let q = match detected[0] {
            Some((k, n)) if n == 1 => format!("{k}"),
            Some((k, n)) => format!("{k}/{n}"),
            None => "none".into(),
        };
        notes.push(format!("|m - {:.3}| = {}: |∫η| ≤ {max_eta:.1e}, ∫ξ/4π² = {q}", lp.center, lp.radius));
    }
    Ok(verdict(ok, notes.join("; ")))
}

fn check_holonomy(p: &Pipeline) -> Result<Outcome> {
    if !p.is_fig8() {
        return Ok(Outcome::Skip(format!("tame-symbol anchors are set up for fig8 only, not {}", p.pres.name)));
    }
    let nc = NumCurve::new(&p.apoly)?;
    let c = |re: f64| Complex64::new(re, 0.0);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let around = |center: Complex64, r: f64| -> Result<_> {
        let l0 = nc.fiber_roots(center + r)?[0];
        Ok(close_circle(&nc, center, r, 0.0, l0, 1024, 4)?.1)
    };
    let loops = [around(c(0.0), 0.3)?, around(c(0.0), 1.3)?, around(c(phi), 0.25)?];
    let mut worst_steinberg: f64 = 0.0;
    for f in ["m", "l*m^2 / m^4 + 1", "m^2 + l / 3"] {
        let f = CurveFunction::parse(f)?;
        let g = f.one_minus()?;
        for path in &loops {
            worst_steinberg = worst_steinberg.max((holonomy(&f, &g, path)? - 1.0).norm());
        }
    }
    let (l, g) = (CurveFunction::parse("l")?, CurveFunction::parse("m - 2 / m^2 + 1")?);
    let mut worst_inverse: f64 = 0.0;
    for path in &loops {
        worst_inverse = worst_inverse.max((holonomy(&l, &g, path)? * holonomy(&g, &l, path)? - 1.0).norm());
    }
    let pc = projective_closure(&p.apoly)?;
    let mut worst_tame: f64 = 0.0;
    for (fs, gs, center, locator) in [("l", "m - 2", 2.0, "m - 2"), ("m - 2", "l", 2.0, "m - 2"), ("l", "m^2 - m - 1", phi, "m^2 - m - 1")] {
        let (f, g) = (CurveFunction::parse(fs)?, CurveFunction::parse(gs)?);
        let loc = CurveFunction::parse(locator)?.num;
        for l0 in nc.fiber_roots(c(center + 0.1))? {
            let (_, path) = close_circle(&nc, c(center), 0.1, 0.0, l0, 2048, 4)?;
            let hol = holonomy(&f, &g, &path)?;
            let lc = nc.fiber_point(c(center), path.first().l)?.0;
            let branch = branch_expansions(&pc, &[c(center), c(1.0), lc], 16)?
                .into_iter()
                .find(|b| valuation(&pc, b, &loc, None).is_ok_and(|v| v > 0))
                .ok_or_else(|| Error::Numeric(format!("no branch of the curve at m = {center}")))?;
            let t = tame_symbol(&pc, &branch, (&f.num, f.den.as_ref()), (&g.num, g.den.as_ref()))?;
            worst_tame = worst_tame.max((hol - t).norm() / (1.0 + t.norm()));
        }
    }
    Ok(verdict(
        worst_steinberg < 1e-6 && worst_inverse < 1e-8 && worst_tame < 1e-6,
        format!(
            "Steinberg |h - 1| ≤ {worst_steinberg:.1e}; |h(f,g)h(g,f) - 1| ≤ {worst_inverse:.1e}; tame symbol mismatch ≤ {worst_tame:.1e}"
        ),
    ))
}

fn check_documented(pres: &KnotPresentation) -> Outcome {
    let fmt = |v: Option<f64>| v.map_or("unset".to_string(), |v| format!("{v}"));
    Outcome::Pass(format!(
        "Vol(K) = {} and CS(K) = {} are preset constants; colored-Jones limits and the K₂ order of {{l, m}} are not computed",
        fmt(pres.vol_constant),
        fmt(pres.cs_constant)
    ))
}
