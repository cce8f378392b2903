//! Line integrals of `η` and `ξ` along tracked paths, and the Vol/CS
//! functions built from them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::track::{CurvePath, Sample};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct FormIntegrals {
    /// `∫ log|l| d arg m − log|m| d arg l`.
    pub eta: f64,
    /// `−∫ log|m| d log|l| + arg l d arg m`.
    pub xi: f64,
    /// `r(l, m)` of a closed path, base point at the first sample.
    pub holonomy: Option<Complex64>,
    /// Richardson estimate from halving the sample grid.
    pub error: f64,
}

/// Composite Simpson on one piece with the Richardson-corrected value and
/// error estimate. `f` has one entry per sample, `f.len() - 1` divisible
/// by 4.
pub(crate) fn simpson_richardson<T>(f: &[T]) -> (T, f64)
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Norm,
{
    let n = f.len() - 1;
    let rule = |stride: usize| {
        let k = n / stride;
        let h = 1.0 / k as f64;
        let mut acc = f[0] + f[n];
        for j in 1..k {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            acc = acc + f[j * stride] * w;
        }
        acc * (h / 3.0)
    };
    let fine = rule(1);
    let coarse = rule(2);
    let diff = (fine - coarse) * (1.0 / 15.0);
    (fine + diff, diff.norm_value())
}

pub(crate) trait Norm {
    fn norm_value(&self) -> f64;
}

impl Norm for f64 {
    fn norm_value(&self) -> f64 {
        self.abs()
    }
}

impl Norm for Complex64 {
    fn norm_value(&self) -> f64 {
        self.norm()
    }
}

fn eta_density(s: &Sample) -> f64 {
    let dm = s.dm / s.m;
    let dl = s.dl / s.l;
    s.log_l.re * dm.im - s.log_m.re * dl.im
}

fn xi_density(s: &Sample) -> f64 {
    let dm = s.dm / s.m;
    let dl = s.dl / s.l;
    -(s.log_m.re * dl.re + s.log_l.im * dm.im)
}

/// Integrates per-piece sample values.
pub(crate) fn integrate_pieces<T>(pieces: &[Vec<T>]) -> (T, f64)
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Norm,
{
    let mut total = T::default();
    let mut err = 0.0;
    for vals in pieces.iter().filter(|v| v.len() >= 5) {
        let (v, e) = simpson_richardson(vals);
        total = total + v;
        err += e;
    }
    (total, err)
}

pub(crate) fn integrate<T, F>(path: &CurvePath, density: F) -> (T, f64)
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Norm,
    F: Fn(&Sample) -> T,
{
    let vals: Vec<Vec<T>> = path.pieces.iter().map(|p| p.iter().map(&density).collect()).collect();
    integrate_pieces(&vals)
}

/// `∫η`, `∫ξ` and, for closed paths, the holonomy of `{l, m}`.
pub fn integrate_forms(path: &CurvePath) -> FormIntegrals {
    let (eta, e1) = integrate(path, eta_density);
    let (xi, e2) = integrate(path, xi_density);
    let holonomy = path.is_closed(1e-8).then(|| {
        let (a, b) = (path.first(), path.last());
        // ∫ log l dm/m − log m(t₀) ∫ dl/l
        let (int, _) = integrate(path, |s: &Sample| s.log_l * (s.dm / s.m));
        let total = int - a.log_m * (b.log_l - a.log_l);
        (total / Complex64::new(0.0, TAU)).exp()
    });
    FormIntegrals { eta, xi, holonomy, error: e1.max(e2) }
}

/// Re-tracks with doubled resolution until the error estimate is below
/// `tol`.
pub fn integrate_to_tolerance(
    curve: &super::track::NumCurve,
    spec: &super::track::PathSpec,
    tol: f64,
    max_doublings: u32,
) -> Result<(CurvePath, FormIntegrals)> {
    let mut spec = spec.clone();
    let mut last = None;
    for _ in 0..=max_doublings {
        let path = super::track::track_numeric(curve, &spec)?;
        let f = integrate_forms(&path);
        if f.error <= tol {
            return Ok((path, f));
        }
        last = Some(f);
        spec = spec.refined(2);
    }
    let f = last.unwrap();
    Err(Error::Numeric(format!(
        "integration error {:.2e} above {tol:.1e} (eta = {}, xi = {})",
        f.error, f.eta, f.xi
    )))
}

/// `(Vol, CS)` at the end of a path that starts at the base point `m = 1`.
pub fn vol_cs(path: &CurvePath, vol_k: f64, cs_k: f64) -> Result<(f64, f64)> {
    let s = path.first();
    if (s.m - 1.0).norm() > 1e-9 {
        return Err(Error::Input(format!("path starts at m = {}, not at the base point m = 1", s.m)));
    }
    let f = integrate_forms(path);
    Ok((vol_k - 2.0 * f.eta, cs_k + f.xi / (PI * PI)))
}

/// Smallest-denominator fraction `k/N` with `N ≤ max_den` and
/// `|value − k/N| < tol`.
pub fn detect_rational(value: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !value.is_finite() {
        return None;
    }
    (1..=max_den.max(1)).find_map(|n| {
        let k = (value * n as f64).round();
        ((value - k / n as f64).abs() < tol).then_some((k as i64, n))
    })
}
