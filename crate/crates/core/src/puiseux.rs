//! Newton–Puiseux expansion of plane-curve branches at the origin.
//!
//! Input is a complex polynomial `g(u, v)` with `g(0,0) = 0`. Each branch is
//! returned as a pair of power series `u(t) = t^e`, `v(t)` in a uniformizing
//! parameter `t`. Exponents are exact bookkeeping; only coefficients are
//! floating point.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;

use crate::algebra::roots::{aberth, polish};
use crate::error::{Error, Result};

/// Coefficients below this fraction of their accumulated magnitude are zero.
const CLEAN_TOL: f64 = 1e-10;
/// Relative distance under which edge roots are the same root.
const CLUSTER_TOL: f64 = 1e-4;
const MAX_LEVELS: usize = 48;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Bivariate complex polynomial; key `(i, j)` is the monomial `u^i v^j`.
/// Each coefficient carries the magnitude it was accumulated from.
#[derive(Clone, Debug, Default)]
pub struct CPoly2 {
    pub terms: BTreeMap<(u32, u32), (Complex64, f64)>,
}

impl CPoly2 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Complex64, mag: f64) {
        let e = self.terms.entry((i, j)).or_insert((czero(), 0.0));
        e.0 += c;
        e.1 += mag;
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Complex64)>>(it: I) -> Self {
        let mut p = Self::new();
        for ((i, j), c) in it {
            p.add_term(i, j, c, c.norm());
        }
        p.cleaned()
    }

    /// Drops numerically cancelled coefficients.
    pub fn cleaned(mut self) -> Self {
        self.terms
            .retain(|_, (c, m)| *m > 0.0 && c.norm() > CLEAN_TOL * *m);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, u: Complex64, v: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(i, j), &(c, _))| c * u.powu(i) * v.powu(j))
            .sum()
    }

    fn min_i(&self) -> u32 {
        self.terms.keys().map(|k| k.0).min().unwrap_or(0)
    }

    fn min_j(&self) -> u32 {
        self.terms.keys().map(|k| k.1).min().unwrap_or(0)
    }

    fn shift(&self, di: u32, dj: u32) -> Self {
        CPoly2 {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), &c)| ((i - di, j - dj), c))
                .collect(),
        }
    }

    /// `g(s^q, s^p (c + w)) / s^B` with `B` the smallest resulting exponent.
    fn edge_substitute(&self, p: u32, q: u32, c: Complex64) -> Self {
        let mut out = CPoly2::new();
        for (&(i, j), &(a, mag)) in &self.terms {
            let e = q * i + p * j;
            let mut binom = 1.0f64;
            for k in 0..=j {
                let cp = c.powu(j - k);
                out.add_term(e, k, a * cp * binom, mag * cp.norm() * binom);
                binom = binom * (j - k) as f64 / (k + 1) as f64;
            }
        }
        let out = out.cleaned();
        let b = out.min_i();
        out.shift(b, 0)
    }

    /// Coefficients `a_j(s)` as dense power series truncated to `n` terms.
    fn coeff_series(&self, n: usize) -> Vec<Vec<Complex64>> {
        let deg = self.terms.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let mut out = vec![vec![czero(); n]; deg + 1];
        for (&(i, j), &(c, _)) in &self.terms {
            if (i as usize) < n {
                out[j as usize][i as usize] += c;
            }
        }
        out
    }
}

/// Dense truncated power-series product.
pub fn ps_mul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![czero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if *x == czero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn ps_inv(a: &[Complex64], n: usize) -> Vec<Complex64> {
    let inv0 = a[0].inv();
    let mut b = vec![czero(); n];
    b[0] = inv0;
    for k in 1..n {
        let mut acc = czero();
        for j in 1..=k.min(a.len() - 1) {
            acc += a[j] * b[k - j];
        }
        b[k] = -acc * inv0;
    }
    b
}

/// Solves `G(s, w(s)) = 0`, `w(0) = 0`, for a simple root by Newton
/// iteration on power series.
fn series_newton(g: &CPoly2, n: usize) -> Vec<Complex64> {
    let a = g.coeff_series(n);
    let mut w = vec![czero(); n];
    let mut prec = 1usize;
    let mut rounds = 0;
    loop {
        prec = (prec * 2).min(n);
        // Horner for G and G_w simultaneously
        let mut gv = a[a.len() - 1].clone();
        let mut dg = vec![czero(); n];
        for coeff in a.iter().rev().skip(1) {
            let t = ps_mul(&dg, &w, prec);
            dg = t.iter().zip(&gv).map(|(x, y)| x + y).collect();
            let t = ps_mul(&gv, &w, prec);
            gv = t.iter().zip(coeff).map(|(x, y)| x + y).collect();
        }
        let step = ps_mul(&gv[..prec], &ps_inv(&dg[..prec], prec), prec);
        for k in 0..prec {
            w[k] -= step[k];
        }
        w[0] = czero();
        if prec == n {
            rounds += 1;
            if rounds >= 2 {
                break;
            }
        }
    }
    w
}

/// One branch: `u(t)`, `v(t)` as power series in a uniformizer `t`.
#[derive(Clone, Debug)]
pub struct LocalBranch {
    /// Ramification index: `u = t^e` (before any rescaling of `t`).
    pub e: u32,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

struct State {
    g: CPoly2,
    e: u32,
    /// `v = base(t) + t^k · w`
    base: Vec<Complex64>,
    k: u32,
}

fn spread(base: &[Complex64], q: u32, n: usize) -> Vec<Complex64> {
    let mut out = vec![czero(); n];
    for (i, c) in base.iter().enumerate() {
        let idx = i * q as usize;
        if idx < n {
            out[idx] = *c;
        }
    }
    out
}

fn edge_roots(points: &[(u32, u32, Complex64)], j_lo: u32, q: u32) -> Result<Vec<(Complex64, u32)>> {
    let deg = points.iter().map(|p| (p.1 - j_lo) / q).max().unwrap_or(0) as usize;
    let mut coeffs = vec![czero(); deg + 1];
    for &(_, j, c) in points {
        coeffs[((j - j_lo) / q) as usize] += c;
    }
    let raw = aberth(&coeffs).map_err(|e| Error::Numeric(format!("edge polynomial: {e}")))?;
    let mut clusters: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for z in raw {
        match clusters
            .iter_mut()
            .find(|(c, _)| (c - z).norm() <= CLUSTER_TOL * (1.0 + z.norm()))
        {
            Some((c, members)) => {
                members.push(z);
                *c = members.iter().sum::<Complex64>() / members.len() as f64;
            }
            None => clusters.push((z, vec![z])),
        }
    }
    Ok(clusters
        .into_iter()
        .map(|(c, m)| {
            let c = if m.len() == 1 { polish(&coeffs, c) } else { c };
            (c, m.len() as u32)
        })
        .collect())
}

/// Lower Newton-polygon edges from `(0, j0)` down to the `j = 0` axis, as
/// `(p, q, edge points, j_lo)` with slope `p/q` in lowest terms.
#[allow(clippy::type_complexity)]
fn polygon_edges(g: &CPoly2) -> Vec<(u32, u32, Vec<(u32, u32, Complex64)>, u32)> {
    let pts: Vec<(u32, u32, Complex64)> = g.terms.iter().map(|(&(i, j), &(c, _))| (i, j, c)).collect();
    let j0 = pts.iter().filter(|p| p.0 == 0).map(|p| p.1).min().unwrap();
    let mut cur = (0u32, j0);
    let mut edges = Vec::new();
    while cur.1 > 0 {
        // smallest slope (i - i0)/(j0 - j); ties go to the lowest j
        let mut best: Option<(u32, u32)> = None;
        for &(i, j, _) in pts.iter().filter(|p| p.1 < cur.1) {
            best = match best {
                None => Some((i, j)),
                Some((bi, bj)) => {
                    let lhs = (i as i64 - cur.0 as i64) * (cur.1 as i64 - bj as i64);
                    let rhs = (bi as i64 - cur.0 as i64) * (cur.1 as i64 - j as i64);
                    if lhs < rhs || (lhs == rhs && j < bj) {
                        Some((i, j))
                    } else {
                        Some((bi, bj))
                    }
                }
            };
        }
        let (ei, ej) = best.unwrap();
        let di = ei - cur.0;
        let dj = cur.1 - ej;
        let gcd = di.gcd(&dj);
        let (p, q) = (di / gcd, dj / gcd);
        let level = q * cur.0 + p * cur.1;
        let on_edge: Vec<_> = pts
            .iter()
            .filter(|pt| q * pt.0 + p * pt.1 == level && pt.1 >= ej && pt.1 <= cur.1)
            .cloned()
            .collect();
        edges.push((p, q, on_edge, ej));
        cur = (ei, ej);
    }
    edges
}

fn expand(state: State, n: usize, depth: usize, out: &mut Vec<LocalBranch>) -> Result<()> {
    if depth > MAX_LEVELS {
        return Err(Error::Numeric(
            "Puiseux expansion did not separate the branches; increase the order".into(),
        ));
    }
    let mut g = state.g;
    if g.is_zero() {
        return Err(Error::Numeric("curve vanishes identically near the point".into()));
    }
    if g.min_j() > 0 {
        // w = 0 is an exact branch
        let mut v = state.base.clone();
        v.resize(n, czero());
        out.push(LocalBranch { e: state.e, u: power(state.e, n), v });
        g = g.shift(0, 1);
        if g.terms.get(&(0, 0)).is_some() {
            return Ok(());
        }
        return expand(State { g, ..state }, n, depth + 1, out);
    }
    if g.terms.contains_key(&(0, 0)) {
        return Ok(());
    }
    if g.min_i() > 0 {
        return Err(Error::Numeric("curve is not squarefree at the point".into()));
    }
    for (p, q, points, j_lo) in polygon_edges(&g) {
        for (zeta, mult) in edge_roots(&points, j_lo, q)? {
            let c = zeta.powf(1.0 / q as f64);
            let g2 = g.edge_substitute(p, q, c);
            let e2 = state.e * q;
            let k2 = state.k * q + p;
            let mut base2 = spread(&state.base, q, n + k2 as usize + 1);
            base2[k2 as usize] += c;
            if mult == 1 {
                let w = series_newton(&g2, n);
                let mut v = base2;
                for (idx, wi) in w.iter().enumerate() {
                    let at = idx + k2 as usize;
                    if at < v.len() {
                        v[at] += wi;
                    }
                }
                v.truncate(n);
                v.resize(n, czero());
                out.push(LocalBranch { e: e2, u: power(e2, n), v });
            } else {
                expand(State { g: g2, e: e2, base: base2, k: k2 }, n, depth + 1, out)?;
            }
        }
    }
    Ok(())
}

fn power(e: u32, n: usize) -> Vec<Complex64> {
    let mut u = vec![czero(); n];
    if (e as usize) < n {
        u[e as usize] = Complex64::new(1.0, 0.0);
    }
    u
}

/// All branches of `g = 0` through the origin, each with `n` known terms.
pub fn branches_at_origin(g: &CPoly2, n: usize) -> Result<Vec<LocalBranch>> {
    let g = g.clone().cleaned();
    if g.terms.contains_key(&(0, 0)) {
        return Err(Error::Numeric("point is not on the curve".into()));
    }
    let mut out = Vec::new();
    let mut g = g;
    if g.min_i() > 0 {
        // the axis u = 0 is a component
        let mut v = vec![czero(); n];
        if n > 1 {
            v[1] = Complex64::new(1.0, 0.0);
        }
        out.push(LocalBranch { e: 0, u: vec![czero(); n], v });
        g = g.shift(1, 0);
        if g.terms.contains_key(&(0, 0)) {
            return Ok(out);
        }
        if g.min_i() > 0 {
            return Err(Error::Numeric("curve is not squarefree at the point".into()));
        }
    }
    expand(State { g, e: 1, base: Vec::new(), k: 0 }, n, 0, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn node_has_two_branches() {
        // u*v = 0
        let g = CPoly2::from_terms([((1, 1), c(1.0))]);
        let b = branches_at_origin(&g, 6).unwrap();
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn cusp_is_one_ramified_branch() {
        // v^2 = u^3
        let g = CPoly2::from_terms([((0, 2), c(1.0)), ((3, 0), c(-1.0))]);
        let b = branches_at_origin(&g, 8).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].e, 2);
        assert!((b[0].v[3].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_branch_series() {
        // v - v^2 - u^2 + 2u^2 v - v^3: v = u^2 - u^4 + ...
        let g = CPoly2::from_terms([
            ((0, 1), c(1.0)),
            ((0, 2), c(-1.0)),
            ((2, 0), c(-1.0)),
            ((2, 1), c(2.0)),
            ((0, 3), c(-1.0)),
        ]);
        let b = branches_at_origin(&g, 8).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].e, 1);
        assert!((b[0].v[2] - c(1.0)).norm() < 1e-12);
        assert!((b[0].v[4] - c(-1.0)).norm() < 1e-12);
        let t = c(0.05);
        let r = g.eval(t, b[0].v.iter().rev().fold(czero(), |a, x| a * t + x));
        assert!(r.norm() < 1e-10);
    }
}
