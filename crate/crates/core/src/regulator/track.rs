//! Predictor-corrector continuation of `l` along a driver `m(t)` on a
//! plane curve `A(m, l) = 0`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::rational::rat_to_f64;
use crate::algebra::roots::{aberth, polish};
use crate::algebra::MultiPoly;
use crate::error::{Error, Result};

/// Fiber roots closer than this count as colliding.
pub const BRANCH_SEPARATION: f64 = 1e-6;
const MAX_HALVINGS: u32 = 30;
const START_RESIDUAL: f64 = 1e-10;

/// Floating copy of a curve in `(m, l)`, for repeated evaluation.
#[derive(Clone, Debug)]
pub struct NumCurve {
    terms: Vec<(i32, i32, f64)>,
    deg_l: usize,
}

impl NumCurve {
    /// The first variable of `a` is `m`, the second `l`.
    pub fn new(a: &MultiPoly) -> Result<Self> {
        if a.vars().len() != 2 {
            return Err(Error::Input(format!("expected a curve in (m, l), got {:?}", a.vars())));
        }
        let terms: Vec<(i32, i32, f64)> = a
            .terms()
            .map(|(mono, c)| (mono.0[0] as i32, mono.0[1] as i32, rat_to_f64(c)))
            .collect();
        let deg_l = terms.iter().map(|t| t.1 as usize).max().unwrap_or(0);
        if deg_l == 0 {
            return Err(Error::Input("curve does not involve l".into()));
        }
        Ok(NumCurve { terms, deg_l })
    }

    pub fn eval(&self, m: Complex64, l: Complex64) -> Complex64 {
        self.terms.iter().map(|&(a, b, c)| c * m.powi(a) * l.powi(b)).sum()
    }

    /// `(A, ∂A/∂m, ∂A/∂l)`.
    pub fn eval_grad(&self, m: Complex64, l: Complex64) -> [Complex64; 3] {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for &(a, b, c) in &self.terms {
            let (ma, lb) = (m.powi(a), l.powi(b));
            out[0] += c * ma * lb;
            if a > 0 {
                out[1] += c * a as f64 * m.powi(a - 1) * lb;
            }
            if b > 0 {
                out[2] += c * b as f64 * ma * l.powi(b - 1);
            }
        }
        out
    }

    /// Second partials `(A_mm, A_ml, A_ll)`.
    pub fn hessian(&self, m: Complex64, l: Complex64) -> [Complex64; 3] {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for &(a, b, c) in &self.terms {
            let (af, bf) = (a as f64, b as f64);
            if a > 1 {
                out[0] += c * af * (af - 1.0) * m.powi(a - 2) * l.powi(b);
            }
            if a > 0 && b > 0 {
                out[1] += c * af * bf * m.powi(a - 1) * l.powi(b - 1);
            }
            if b > 1 {
                out[2] += c * bf * (bf - 1.0) * m.powi(a) * l.powi(b - 2);
            }
        }
        out
    }

    /// `|A| / Σ|terms|`.
    pub fn relative_residual(&self, m: Complex64, l: Complex64) -> f64 {
        let scale: f64 = self.terms.iter().map(|&(a, b, c)| (c * m.powi(a) * l.powi(b)).norm()).sum();
        self.eval(m, l).norm() / scale.max(1e-300)
    }

    /// Coefficients of `A(m, ·)`, constant term first.
    pub fn fiber(&self, m: Complex64) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); self.deg_l + 1];
        for &(a, b, coef) in &self.terms {
            c[b as usize] += coef * m.powi(a);
        }
        c
    }

    pub fn fiber_roots(&self, m: Complex64) -> Result<Vec<Complex64>> {
        let c = self.fiber(m);
        let lead = c[self.deg_l].norm();
        let scale: f64 = c.iter().map(|x| x.norm()).sum();
        if lead <= 1e-14 * scale {
            return Err(Error::Numeric(format!("l has a pole over m = {m}")));
        }
        Ok(aberth(&c)?.into_iter().map(|z| polish(&c, z)).collect())
    }

    /// The fiber root nearest `hint`. A root that Aberth resolves as a
    /// cluster is refined as a root of `∂A/∂l`.
    pub fn fiber_point(&self, m: Complex64, hint: Complex64) -> Result<(Complex64, usize)> {
        let fiber = self.fiber_roots(m)?;
        let l = *fiber
            .iter()
            .min_by(|a, b| (*a - hint).norm().total_cmp(&(*b - hint).norm()))
            .ok_or_else(|| Error::Numeric(format!("empty fiber over m = {m}")))?;
        let cluster: Vec<Complex64> = fiber.iter().filter(|r| (*r - l).norm() < 1e-5 * (1.0 + l.norm())).cloned().collect();
        if cluster.len() == 1 {
            return Ok((l, 1));
        }
        let mut l = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
        for _ in 0..4 {
            let g = self.eval_grad(m, l);
            let h = self.hessian(m, l);
            if h[2].norm() == 0.0 {
                break;
            }
            l -= g[2] / h[2];
        }
        Ok((l, cluster.len()))
    }

    /// Tangent directions `dl/dm` of the branches through a node, from the
    /// quadratic part of `A` at the point.
    pub fn node_slopes(&self, m: Complex64, l: Complex64) -> Vec<Complex64> {
        let [amm, aml, all] = self.hessian(m, l);
        if all.norm() < 1e-12 {
            return Vec::new();
        }
        let disc = (aml * aml - amm * all).sqrt();
        vec![(-aml + disc) / all, (-aml - disc) / all]
    }

    /// Both partials vanish to rounding.
    pub fn is_node(&self, m: Complex64, l: Complex64) -> bool {
        let g = self.eval_grad(m, l);
        let scale: f64 = self.terms.iter().map(|&(a, b, c)| (c * m.powi(a) * l.powi(b)).norm()).sum();
        g[1].norm() * m.norm() < 1e-6 * scale && g[2].norm() * l.norm() < 1e-6 * scale
    }

    /// `dl/dm` at a smooth point with `∂A/∂l ≠ 0`.
    pub fn slope(&self, m: Complex64, l: Complex64) -> Complex64 {
        let g = self.eval_grad(m, l);
        -g[1] / g[2]
    }
}

/// One piece of the `m`-driver, parametrized by `s ∈ [0, 1]`. Angles are
/// in turns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Piece {
    Segment { from: Complex64, to: Complex64 },
    Arc { center: Complex64, radius: f64, start: f64, turns: f64 },
}

impl Piece {
    /// `(m(s), dm/ds)`.
    pub fn at(&self, s: f64) -> (Complex64, Complex64) {
        match *self {
            Piece::Segment { from, to } => (from + (to - from) * s, to - from),
            Piece::Arc { center, radius, start, turns } => {
                let w = Complex64::from_polar(radius, TAU * (start + turns * s));
                (center + w, w * Complex64::new(0.0, TAU * turns))
            }
        }
    }

    pub fn reversed(&self) -> Piece {
        match *self {
            Piece::Segment { from, to } => Piece::Segment { from: to, to: from },
            Piece::Arc { center, radius, start, turns } => {
                Piece::Arc { center, radius, start: start + turns, turns: -turns }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PathSpec {
    pub pieces: Vec<Piece>,
    /// Starting point `(m, l)` on the curve.
    pub start: [Complex64; 2],
    /// Branch direction `dl/dm` when the start is a node of the curve.
    pub start_slope: Option<Complex64>,
    /// Samples per piece and per unit of arc turns; rounded up to a
    /// multiple of 4.
    pub resolution: usize,
}

impl PathSpec {
    pub fn new(pieces: Vec<Piece>, start: [Complex64; 2], resolution: usize) -> Self {
        PathSpec { pieces, start, start_slope: None, resolution }
    }

    pub fn refined(&self, factor: usize) -> Self {
        PathSpec { resolution: self.resolution * factor, ..self.clone() }
    }

    fn intervals(&self, piece: &Piece) -> usize {
        let w = match piece {
            Piece::Arc { turns, .. } => turns.abs().max(1.0),
            Piece::Segment { .. } => 1.0,
        };
        let n = (self.resolution as f64 * w).ceil() as usize;
        n.max(4).div_ceil(4) * 4
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sample {
    pub t: f64,
    pub m: Complex64,
    pub l: Complex64,
    /// `dm/ds` and `dl/ds` in the piece parameter.
    pub dm: Complex64,
    pub dl: Complex64,
    /// Continuous logarithms: real part `log|·|`, imaginary part the
    /// unwrapped argument.
    pub log_m: Complex64,
    pub log_l: Complex64,
}

impl Sample {
    pub fn arg_m(&self) -> f64 {
        self.log_m.im
    }

    pub fn arg_l(&self) -> f64 {
        self.log_l.im
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvePath {
    /// Samples of each piece, endpoints included. The first sample of a
    /// piece repeats the last one of the previous piece.
    pub pieces: Vec<Vec<Sample>>,
    /// Corrector steps taken beyond the sample grid.
    pub extra_steps: usize,
    pub min_separation: f64,
    pub max_residual: f64,
}

impl CurvePath {
    pub fn first(&self) -> &Sample {
        &self.pieces[0][0]
    }

    pub fn last(&self) -> &Sample {
        self.pieces.last().unwrap().last().unwrap()
    }

    pub fn samples(&self) -> impl Iterator<Item = &Sample> {
        self.pieces.iter().enumerate().flat_map(|(i, p)| p.iter().skip(usize::from(i > 0)))
    }

    /// Whether the path returns to its start, eigenvalues compared to `tol`
    /// relative.
    pub fn is_closed(&self, tol: f64) -> bool {
        let (a, b) = (self.first(), self.last());
        (a.m - b.m).norm() <= tol * (1.0 + a.m.norm()) && (a.l - b.l).norm() <= tol * (1.0 + a.l.norm())
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> CurvePath {
        let mut pieces: Vec<Vec<Sample>> = self
            .pieces
            .iter()
            .rev()
            .map(|p| {
                p.iter()
                    .rev()
                    .map(|s| Sample { t: 1.0 - s.t, dm: -s.dm, dl: -s.dl, ..*s })
                    .collect()
            })
            .collect();
        if pieces.is_empty() {
            pieces.push(Vec::new());
        }
        CurvePath { pieces, ..self.clone() }
    }

    /// Appends `other`, which must start where `self` ends. Its logarithms
    /// are shifted onto the branch reached by `self`.
    pub fn concat(&self, other: &CurvePath) -> Result<CurvePath> {
        let (a, b) = (self.last(), other.first());
        if (a.m - b.m).norm() > 1e-9 * (1.0 + a.m.norm()) || (a.l - b.l).norm() > 1e-9 * (1.0 + a.l.norm()) {
            return Err(Error::Input("paths do not join".into()));
        }
        let shift_m = Complex64::new(0.0, TAU * ((a.log_m.im - b.log_m.im) / TAU).round());
        let shift_l = Complex64::new(0.0, TAU * ((a.log_l.im - b.log_l.im) / TAU).round());
        let np = (self.pieces.len() + other.pieces.len()) as f64;
        let mut pieces = self.pieces.clone();
        for p in &other.pieces {
            pieces.push(p.iter().map(|s| Sample { log_m: s.log_m + shift_m, log_l: s.log_l + shift_l, ..*s }).collect());
        }
        for (i, p) in pieces.iter_mut().enumerate() {
            let n = (p.len() - 1).max(1) as f64;
            for (k, s) in p.iter_mut().enumerate() {
                s.t = (i as f64 + k as f64 / n) / np;
            }
        }
        Ok(CurvePath {
            pieces,
            extra_steps: self.extra_steps + other.extra_steps,
            min_separation: self.min_separation.min(other.min_separation),
            max_residual: self.max_residual.max(other.max_residual),
        })
    }
}

/// Principal argument in `[0, 2π)`.
pub fn arg_0_2pi(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Logarithm with the argument in `[0, 2π)`.
pub fn log_0_2pi(z: Complex64) -> Complex64 {
    Complex64::new(z.norm().ln(), arg_0_2pi(z))
}

fn min_gap(roots: &[Complex64], i: usize) -> f64 {
    roots
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, r)| (r - roots[i]).norm())
        .fold(f64::INFINITY, f64::min)
}

struct Tracker<'a> {
    curve: &'a NumCurve,
    extra: usize,
    min_sep: f64,
    max_res: f64,
}

impl Tracker<'_> {
    /// Moves from `(m0, l0)` at parameter `s0` to `s1`, halving the step
    /// until the selected root is unambiguous.
    fn advance(
        &mut self,
        piece: &Piece,
        s0: f64,
        s1: f64,
        mut l: Complex64,
        mut slope: Option<Complex64>,
        t_of: &dyn Fn(f64) -> f64,
        ends_path: bool,
    ) -> Result<Step> {
        let mut s = s0;
        let mut h = s1 - s0;
        let mut halvings = 0;
        let zero = Complex64::new(0.0, 0.0);
        let (mut dlog_m, mut dlog_l) = (zero, zero);
        while s < s1 {
            let h_eff = h.min(s1 - s);
            let (m, _) = piece.at(s);
            let (m_new, _) = piece.at(s + h_eff);
            if m_new.norm() == 0.0 {
                return Err(Error::Input(format!("driver passes through m = 0 at t = {}", t_of(s + h_eff))));
            }
            let dl_dm = slope.unwrap_or_else(|| self.curve.slope(m, l));
            let pred = l + dl_dm * (m_new - m);
            let roots = self.curve.fiber_roots(m_new)?;
            let (i, dist) = roots
                .iter()
                .enumerate()
                .map(|(i, r)| (i, (r - pred).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .ok_or_else(|| Error::Numeric("empty fiber".into()))?;
            let sep = min_gap(&roots, i);
            let mut r = roots[i];
            // arriving exactly at a node is allowed as the last point
            let into_node = ends_path && s + h_eff >= s1 && sep < BRANCH_SEPARATION && {
                let cluster: Vec<&Complex64> = roots.iter().filter(|z| (*z - r).norm() < BRANCH_SEPARATION).collect();
                let mean = cluster.iter().copied().sum::<Complex64>() / cluster.len() as f64;
                let hit = (mean - pred).norm() <= 1e-6 * (1.0 + mean.norm()) && self.curve.is_node(m_new, mean);
                if hit {
                    r = mean;
                }
                hit
            };
            let (jm, jl) = ((m_new / m).ln(), (r / l).ln());
            if (3.0 * dist < sep || into_node) && jm.im.abs() < PI / 2.0 && jl.im.abs() < PI / 2.0 {
                s += h_eff;
                l = r;
                dlog_m += jm;
                dlog_l += jl;
                slope = None;
                self.min_sep = self.min_sep.min(sep);
                if s < s1 {
                    self.extra += 1;
                }
                if halvings > 0 {
                    h *= 2.0;
                    halvings -= 1;
                }
                continue;
            }
            if sep < BRANCH_SEPARATION {
                return Err(Error::NearBranchPoint { t: t_of(s + h_eff), distance: sep });
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::NearBranchPoint { t: t_of(s), distance: sep });
            }
            h /= 2.0;
        }
        self.max_res = self.max_res.max(self.curve.relative_residual(piece.at(s1).0, l));
        Ok(Step { l, dlog_m, dlog_l })
    }
}

struct Step {
    l: Complex64,
    dlog_m: Complex64,
    dlog_l: Complex64,
}

/// Tracks the fiber root starting at `spec.start` along the driver.
pub fn track_path(curve: &MultiPoly, spec: &PathSpec) -> Result<CurvePath> {
    let nc = NumCurve::new(curve)?;
    track_numeric(&nc, spec)
}

pub fn track_numeric(nc: &NumCurve, spec: &PathSpec) -> Result<CurvePath> {
    let [m0, l0] = spec.start;
    if spec.pieces.is_empty() {
        return Err(Error::Input("path has no pieces".into()));
    }
    if m0.norm() == 0.0 || l0.norm() == 0.0 {
        return Err(Error::Input("start has a zero eigenvalue".into()));
    }
    let res = nc.relative_residual(m0, l0);
    if res > START_RESIDUAL {
        return Err(Error::Input(format!("start is not on the curve (residual {res:.2e})")));
    }
    let fiber = nc.fiber_roots(m0)?;
    let idx = fiber
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - l0).norm().total_cmp(&(b.1 - l0).norm()))
        .map(|(i, _)| i)
        .unwrap();
    let node = min_gap(&fiber, idx) < BRANCH_SEPARATION;
    if node && spec.start_slope.is_none() {
        return Err(Error::NearBranchPoint { t: 0.0, distance: min_gap(&fiber, idx) });
    }
    let mut tr = Tracker { curve: nc, extra: 0, min_sep: f64::INFINITY, max_res: res };
    let np = spec.pieces.len() as f64;
    let mut out = Vec::with_capacity(spec.pieces.len());
    let mut m = m0;
    let mut l = l0;
    let mut log_m = log_0_2pi(m0);
    let mut log_l = log_0_2pi(l0);
    let mut slope = if node { spec.start_slope } else { None };
    for (i, piece) in spec.pieces.iter().enumerate() {
        let (pm, _) = piece.at(0.0);
        if (pm - m).norm() > 1e-12 * (1.0 + m.norm()) {
            return Err(Error::Input(format!("piece {i} does not start where the path is")));
        }
        let n = spec.intervals(piece);
        let t_of = |s: f64| (i as f64 + s) / np;
        let mut samples = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let s = k as f64 / n as f64;
            let (m_new, dm) = piece.at(s);
            if k > 0 {
                let s_prev = (k - 1) as f64 / n as f64;
                let ends = i + 1 == spec.pieces.len() && k == n;
                let step = tr.advance(piece, s_prev, s, l, slope.take(), &t_of, ends)?;
                l = step.l;
                log_m += step.dlog_m;
                log_l += step.dlog_l;
            }
            m = m_new;
            let dl = if k == 0 && i == 0 && node {
                spec.start_slope.unwrap() * dm
            } else if nc.is_node(m, l) {
                // tangent of the branch we arrived on
                let incoming = samples.last().map(|p: &Sample| p.dl / p.dm).unwrap_or_default();
                let v = nc
                    .node_slopes(m, l)
                    .into_iter()
                    .min_by(|a, b| (a - incoming).norm().total_cmp(&(b - incoming).norm()))
                    .unwrap_or(incoming);
                v * dm
            } else {
                nc.slope(m, l) * dm
            };
            samples.push(Sample { t: t_of(s), m, l, dm, dl, log_m, log_l });
        }
        out.push(samples);
    }
    Ok(CurvePath { pieces: out, extra_steps: tr.extra, min_separation: tr.min_sep, max_residual: tr.max_res })
}
