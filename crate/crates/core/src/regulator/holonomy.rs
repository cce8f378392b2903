//! The regulator holonomy `r(f, g)` of a loop.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::forms::integrate_pieces;
use super::track::{log_0_2pi, CurvePath, Sample};
use crate::algebra::parse_poly;
use crate::algebra::MultiPoly;
use crate::boundary::APOLY_VARS;
use crate::error::{Error, Result};

/// Rational function `num/den` in `(m, l)`.
#[derive(Clone, Debug)]
pub struct CurveFunction {
    pub num: MultiPoly,
    pub den: Option<MultiPoly>,
    num_f: Poly2,
    den_f: Option<Poly2>,
}

#[derive(Clone, Debug)]
struct Poly2(Vec<(i32, i32, f64)>);

impl Poly2 {
    fn new(p: &MultiPoly) -> Result<Self> {
        let p = p.with_vars(&APOLY_VARS)?;
        Ok(Poly2(
            p.terms()
                .map(|(mono, c)| (mono.0[0] as i32, mono.0[1] as i32, crate::algebra::rational::rat_to_f64(c)))
                .collect(),
        ))
    }

    /// Value and derivative along `(m, l)` moving with `(dm, dl)`.
    fn jet(&self, m: Complex64, l: Complex64, dm: Complex64, dl: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let (mut v, mut d) = (zero, zero);
        for &(a, b, c) in &self.0 {
            let (ma, lb) = (m.powi(a), l.powi(b));
            v += c * ma * lb;
            if a > 0 {
                d += c * a as f64 * m.powi(a - 1) * lb * dm;
            }
            if b > 0 {
                d += c * b as f64 * ma * l.powi(b - 1) * dl;
            }
        }
        (v, d)
    }

    fn scale(&self, m: Complex64, l: Complex64) -> f64 {
        self.0.iter().map(|&(a, b, c)| (c * m.powi(a) * l.powi(b)).norm()).sum()
    }
}

impl CurveFunction {
    pub fn new(num: MultiPoly, den: Option<MultiPoly>) -> Result<Self> {
        let num = num.with_vars(&APOLY_VARS)?;
        let den = den.map(|d| d.with_vars(&APOLY_VARS)).transpose()?;
        if num.is_zero() || den.as_ref().is_some_and(|d| d.is_zero()) {
            return Err(Error::Input("zero function".into()));
        }
        let num_f = Poly2::new(&num)?;
        let den_f = den.as_ref().map(Poly2::new).transpose()?;
        Ok(CurveFunction { num, den, num_f, den_f })
    }

    /// Parses `"num"` or `"num / den"`, each in `m` and `l`.
    pub fn parse(s: &str) -> Result<Self> {
        let (n, d) = match s.split_once(" / ") {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let num = parse_poly(n, &APOLY_VARS)?;
        let den = d.map(|d| parse_poly(d, &APOLY_VARS)).transpose()?;
        Self::new(num, den)
    }

    pub fn product(&self, other: &CurveFunction) -> Result<Self> {
        let den = match (&self.den, &other.den) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => Some(a * b),
        };
        Self::new(&self.num * &other.num, den)
    }

    /// `1 − f`.
    pub fn one_minus(&self) -> Result<Self> {
        let one = MultiPoly::one(&APOLY_VARS);
        let den = self.den.clone().unwrap_or(one);
        Self::new(&den - &self.num, self.den.clone())
    }

    /// `(f, df/ds)` at a sample, `None` on a zero or pole.
    fn jet(&self, s: &Sample) -> Option<(Complex64, Complex64)> {
        let (n, dn) = self.num_f.jet(s.m, s.l, s.dm, s.dl);
        let tiny = |v: Complex64, p: &Poly2| v.norm() <= 1e-12 * p.scale(s.m, s.l);
        if tiny(n, &self.num_f) {
            return None;
        }
        match &self.den_f {
            None => Some((n, dn)),
            Some(df) => {
                let (d, dd) = df.jet(s.m, s.l, s.dm, s.dl);
                if tiny(d, df) {
                    return None;
                }
                Some((n / d, (dn * d - n * dd) / (d * d)))
            }
        }
    }

    pub fn eval(&self, m: Complex64, l: Complex64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let (n, _) = self.num_f.jet(m, l, zero, zero);
        match &self.den_f {
            None => n,
            Some(d) => n / d.jet(m, l, zero, zero).0,
        }
    }
}

struct Track {
    /// Continuous `log f` per piece.
    logs: Vec<Vec<Complex64>>,
    /// `f'/f` per piece.
    dlogs: Vec<Vec<Complex64>>,
}

fn track_function(f: &CurveFunction, path: &CurvePath) -> Result<Track> {
    let miss = || Error::Input("loop meets S(f) ∪ S(g)".into());
    let first = f.jet(path.first()).ok_or_else(miss)?;
    let mut log = log_0_2pi(first.0);
    let mut prev = first.0;
    let mut logs = Vec::new();
    let mut dlogs = Vec::new();
    for piece in &path.pieces {
        let mut lp = Vec::with_capacity(piece.len());
        let mut dp = Vec::with_capacity(piece.len());
        for s in piece {
            let (v, d) = f.jet(s).ok_or_else(miss)?;
            let step = (v / prev).ln();
            if step.im.abs() > std::f64::consts::FRAC_PI_2 {
                return Err(Error::Numeric("argument of f jumps between samples; refine the path".into()));
            }
            log += step;
            prev = v;
            lp.push(log);
            dp.push(d / v);
        }
        logs.push(lp);
        dlogs.push(dp);
    }
    Ok(Track { logs, dlogs })
}

/// `exp((1/2πi)(∫ log f dg/g − log g(t₀) ∫ df/f))` over a closed path,
/// with `t₀` its first sample and `arg g(t₀) ∈ [0, 2π)`.
pub fn holonomy(f: &CurveFunction, g: &CurveFunction, path: &CurvePath) -> Result<Complex64> {
    holonomy_with_error(f, g, path).map(|h| h.0)
}

pub fn holonomy_with_error(f: &CurveFunction, g: &CurveFunction, path: &CurvePath) -> Result<(Complex64, f64)> {
    if !path.is_closed(1e-8) {
        return Err(Error::Input("holonomy needs a closed path".into()));
    }
    let tf = track_function(f, path)?;
    let tg = track_function(g, path)?;
    let dens: Vec<Vec<Complex64>> = tf
        .logs
        .iter()
        .zip(&tg.dlogs)
        .map(|(lf, dg)| lf.iter().zip(dg).map(|(a, b)| a * b).collect())
        .collect();
    let (int, err) = integrate_pieces(&dens);
    let log_f_end = *tf.logs.last().unwrap().last().unwrap();
    let log_f_start = tf.logs[0][0];
    let log_g0 = tg.logs[0][0];
    let total = int - log_g0 * (log_f_end - log_f_start);
    let value = (total / Complex64::new(0.0, TAU)).exp();
    Ok((value, err * value.norm() / TAU))
}
