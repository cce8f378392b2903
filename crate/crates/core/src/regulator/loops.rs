//! Closed loops on the eigenvalue curve, generated from the critical
//! values of the `m`-projection.
//!
//! Loops start at a point with `m` real and positive. Any path from the
//! base point `m = 1` to such a start changes `arg m` by zero, so
//! conjugating by it leaves `∫ξ` unchanged up to `4π²ℤ` and `∫η`
//! unchanged.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::track::{track_numeric, CurvePath, NumCurve, PathSpec, Piece, BRANCH_SEPARATION};
use crate::algebra::{resultant, roots, MultiPoly};
use crate::boundary::APOLY_VARS;
use crate::error::{Error, Result};

const RADII: [f64; 8] = [0.12, 0.2, 0.3, 0.5, 0.8, 1.3, 2.0, 3.2];

/// `m`-values over which the fiber degenerates: discriminant roots,
/// poles and zeros of `l`, and `m = 0`.
pub fn critical_m_values(curve: &MultiPoly) -> Result<Vec<Complex64>> {
    let a = curve.with_vars(&APOLY_VARS)?;
    let da = a.derivative("l");
    let mut polys = vec![resultant(&a, &da, "l")?, a.lc_in("l"), a.coeffs_in("l")[0].clone()];
    polys.retain(|p| !p.is_constant());
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for p in polys {
        for r in roots(&p.with_vars(&["m"])?, "m")? {
            if out.iter().all(|c| (c - r.value).norm() > 1e-8) {
                out.push(r.value);
            }
        }
    }
    out.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopSpec {
    pub center: Complex64,
    pub radius: f64,
    /// Start angle in turns; the start `m` is real and positive.
    pub start_angle: f64,
    pub turns: u32,
    pub start: [Complex64; 2],
    /// Critical values inside the circle.
    pub encloses: Vec<Complex64>,
}

impl LoopSpec {
    pub fn path_spec(&self, resolution: usize) -> PathSpec {
        PathSpec::new(
            vec![Piece::Arc { center: self.center, radius: self.radius, start: self.start_angle, turns: self.turns as f64 }],
            self.start,
            resolution,
        )
    }

    pub fn describe(&self) -> String {
        format!(
            "circle |m - ({:.4}{:+.4}i)| = {} from m = {:.4}, {} turn(s), l0 = {:.4}{:+.4}i",
            self.center.re, self.center.im, self.radius, self.start[0].re, self.turns, self.start[1].re, self.start[1].im
        )
    }
}

/// Repeats the circle until the tracked root returns to `l0`.
pub fn close_circle(
    nc: &NumCurve,
    center: Complex64,
    radius: f64,
    start_angle: f64,
    l0: Complex64,
    resolution: usize,
    max_turns: u32,
) -> Result<(u32, CurvePath)> {
    let m0 = center + Complex64::from_polar(radius, TAU * start_angle);
    for turns in 1..=max_turns {
        let spec = PathSpec::new(
            vec![Piece::Arc { center, radius, start: start_angle, turns: turns as f64 }],
            [m0, l0],
            resolution,
        );
        let path = track_numeric(nc, &spec)?;
        if path.is_closed(1e-8) {
            return Ok((turns, path));
        }
    }
    Err(Error::Numeric(format!("circle around {center} did not close within {max_turns} turns")))
}

/// Start angle putting `center + radius·e^{2πiθ}` on the positive real
/// axis, preferring the larger real part.
fn real_start(center: Complex64, radius: f64) -> Option<f64> {
    let s = -center.im / radius;
    if s.abs() > 1.0 {
        return None;
    }
    let a = s.asin();
    [a, std::f64::consts::PI - a]
        .into_iter()
        .map(|th| (th, center.re + radius * th.cos()))
        .filter(|&(_, re)| re > 0.05)
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(th, _)| th / TAU)
}

/// Up to `count` closed loops with distinct sets of enclosed critical
/// values, keeping a relative margin from every critical value.
pub fn loop_library(curve: &MultiPoly, count: usize, resolution: usize) -> Result<Vec<LoopSpec>> {
    let nc = NumCurve::new(&curve.with_vars(&APOLY_VARS)?)?;
    let crit = critical_m_values(curve)?;
    let deg_l = curve.degree_in("l").unwrap_or(1);
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut out = Vec::new();
    for (ci, &c) in crit.iter().enumerate() {
        for r in RADII {
            if out.len() >= count {
                return Ok(out);
            }
            let margin = crit.iter().map(|p| ((p - c).norm() - r).abs()).fold(f64::INFINITY, f64::min);
            if margin < (0.25 * r).max(0.04) {
                continue;
            }
            let Some(theta) = real_start(c, r) else { continue };
            let inside: Vec<usize> = (0..crit.len()).filter(|&j| (crit[j] - c).norm() < r).collect();
            if !inside.contains(&ci) || seen.contains(&inside) {
                continue;
            }
            let m0 = c + Complex64::from_polar(r, TAU * theta);
            let m0 = Complex64::new(m0.re, 0.0);
            let mut fiber = nc.fiber_roots(m0)?;
            fiber.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            let Some(&l0) = fiber.first() else { continue };
            match close_circle(&nc, c, r, theta, l0, resolution, deg_l) {
                Ok((turns, _)) => {
                    seen.push(inside.clone());
                    out.push(LoopSpec {
                        center: c,
                        radius: r,
                        start_angle: theta,
                        turns,
                        start: [m0, l0],
                        encloses: inside.iter().map(|&j| crit[j]).collect(),
                    });
                }
                Err(Error::NearBranchPoint { .. }) | Err(Error::Numeric(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// The base point over `m = 1` together with the branch direction to
/// use when it is a node.
///
/// At a node the branch is the one along which `Vol` decreases as `|m|`
/// grows from 1: there `dVol = 2 log|m| d arg l`, so `d log l / d log m`
/// must have negative imaginary part.
pub fn base_point(nc: &NumCurve, l_hint: Complex64) -> Result<PathSpecStart> {
    let m = Complex64::new(1.0, 0.0);
    let (l, mult) = nc.fiber_point(m, l_hint)?;
    if mult == 1 {
        return Ok(PathSpecStart { point: [m, l], slope: None });
    }
    let g = nc.eval_grad(m, l);
    if g[1].norm() > BRANCH_SEPARATION.sqrt() {
        return Err(Error::NearBranchPoint { t: 0.0, distance: 0.0 });
    }
    let slope = nc
        .node_slopes(m, l)
        .into_iter()
        .find(|s| (s * m / l).im < 0.0)
        .ok_or_else(|| Error::Numeric("no branch at the base point".into()))?;
    Ok(PathSpecStart { point: [m, l], slope: Some(slope) })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PathSpecStart {
    pub point: [Complex64; 2],
    pub slope: Option<Complex64>,
}

impl PathSpecStart {
    pub fn spec(&self, pieces: Vec<Piece>, resolution: usize) -> PathSpec {
        PathSpec { pieces, start: self.point, start_slope: self.slope, resolution }
    }
}
