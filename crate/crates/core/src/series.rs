//! Truncated Laurent series with complex coefficients.
//!
//! Every coefficient carries a running error estimate propagated from the
//! computed values (not from accumulated magnitudes), so a long chain of
//! cancellations still leaves an honest bound. A coefficient counts as zero
//! when it is within a safety factor of its error.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// A coefficient is significant once it exceeds its error estimate by this.
pub const SAFETY: f64 = 64.0;
const EPS: f64 = f64::EPSILON;

#[derive(Clone, Debug)]
pub struct Series {
    /// Exponent of `coeffs[0]`.
    pub val: i64,
    pub coeffs: Vec<Complex64>,
    pub err: Vec<f64>,
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Series {
    /// Known terms; the series is exact up to `O(s^(val + len))`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Absolute precision: the exponent of the first unknown term.
    pub fn precision(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    /// An exact constant known to `n` terms.
    pub fn constant(c: Complex64, n: usize) -> Self {
        let mut coeffs = vec![czero(); n.max(1)];
        coeffs[0] = c;
        Series { val: 0, coeffs, err: vec![0.0; n.max(1)] }
    }

    pub fn real(c: f64, n: usize) -> Self {
        Self::constant(Complex64::new(c, 0.0), n)
    }

    /// Series from computed coefficients with a relative input error
    /// `rel`, measured against the largest coefficient damped by `2^-k`.
    pub fn from_coeffs_with_error(val: i64, coeffs: Vec<Complex64>, rel: f64) -> Self {
        let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let err = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| rel * c.norm().max(top * 0.5f64.powi(k.min(1000) as i32)))
            .collect();
        Series { val, coeffs, err }
    }

    /// Series whose coefficients are exact.
    pub fn from_coeffs(val: i64, coeffs: Vec<Complex64>) -> Self {
        let n = coeffs.len();
        Series { val, coeffs, err: vec![0.0; n] }
    }

    /// `s^k` with `n` known terms.
    pub fn monomial(k: i64, n: usize) -> Self {
        let mut s = Self::real(1.0, n);
        s.val = k;
        s
    }

    pub fn is_negligible(&self, k: usize) -> bool {
        self.coeffs[k].norm() <= SAFETY * self.err[k]
    }

    /// Exponent of the first significant term, if any is known.
    pub fn valuation(&self) -> Option<i64> {
        self.leading().map(|l| l.0)
    }

    pub fn leading(&self) -> Option<(i64, Complex64)> {
        (0..self.len())
            .find(|&k| !self.is_negligible(k))
            .map(|k| (self.val + k as i64, self.coeffs[k]))
    }

    /// Drops negligible leading terms, shifting `val`.
    pub fn normalized(&self) -> Self {
        match (0..self.len()).find(|&k| !self.is_negligible(k)) {
            Some(k) => self.drop_front(k),
            None => Series { val: self.precision(), coeffs: Vec::new(), err: Vec::new() },
        }
    }

    fn drop_front(&self, k: usize) -> Self {
        Series {
            val: self.val + k as i64,
            coeffs: self.coeffs[k..].to_vec(),
            err: self.err[k..].to_vec(),
        }
    }

    /// Drops exactly-zero leading terms so products keep their relative
    /// precision.
    fn strip_exact_zeros(&self) -> Series {
        let k = (0..self.len())
            .find(|&k| self.coeffs[k] != czero() || self.err[k] != 0.0)
            .unwrap_or(self.len());
        if k == 0 {
            self.clone()
        } else {
            self.drop_front(k)
        }
    }

    /// Keeps at most `n` known terms.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Series { val: self.val, coeffs: self.coeffs[..n].to_vec(), err: self.err[..n].to_vec() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Series {
            val: self.val,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            err: self
                .err
                .iter()
                .zip(&self.coeffs)
                .map(|(e, a)| e * c.norm() + EPS * (a * c).norm())
                .collect(),
        }
    }

    pub fn shift(&self, k: i64) -> Self {
        let mut s = self.clone();
        s.val += k;
        s
    }

    /// Coefficientwise absolute values, as an exact series.
    pub fn abs(&self) -> Self {
        Series {
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| Complex64::new(c.norm(), 0.0)).collect(),
            err: vec![0.0; self.len()],
        }
    }

    /// Multiplicative inverse; requires a significant leading term.
    pub fn inverse(&self) -> Option<Self> {
        let s = self.normalized();
        if s.is_empty() {
            return None;
        }
        let n = s.len();
        let inv0 = s.coeffs[0].inv();
        let r0 = inv0.norm();
        let mut b = vec![czero(); n];
        let mut be = vec![0.0; n];
        b[0] = inv0;
        be[0] = r0 * r0 * s.err[0] + EPS * r0;
        for k in 1..n {
            let mut acc = czero();
            let mut e = 0.0;
            let mut mag = 0.0;
            for j in 1..=k {
                let t = s.coeffs[j] * b[k - j];
                acc += t;
                mag += t.norm();
                e += s.coeffs[j].norm() * be[k - j] + s.err[j] * b[k - j].norm() + s.err[j] * be[k - j];
            }
            b[k] = -acc * inv0;
            be[k] = r0 * (e + (k as f64 + 2.0) * EPS * mag) + b[k].norm() * r0 * s.err[0];
        }
        Some(Series { val: -s.val, coeffs: b, err: be })
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        Some(self * &other.inverse()?)
    }

    /// Square root with the principal branch on the leading coefficient;
    /// `None` when the valuation is odd or unknown.
    pub fn sqrt(&self) -> Option<Self> {
        let s = self.normalized();
        if s.is_empty() || s.val % 2 != 0 {
            return None;
        }
        let n = s.len();
        let y0 = s.coeffs[0].sqrt();
        let r0 = y0.norm();
        let mut y = vec![czero(); n];
        let mut ye = vec![0.0; n];
        y[0] = y0;
        ye[0] = s.err[0] / (2.0 * r0) + EPS * r0;
        let inv2y0 = (y0 * 2.0).inv();
        for k in 1..n {
            let mut acc = czero();
            let mut e = s.err[k];
            let mut mag = s.coeffs[k].norm();
            for j in 1..k {
                let t = y[j] * y[k - j];
                acc += t;
                mag += t.norm();
                e += 2.0 * y[j].norm() * ye[k - j];
            }
            y[k] = (s.coeffs[k] - acc) * inv2y0;
            ye[k] = (e + (k as f64 + 2.0) * EPS * mag) * inv2y0.norm() + y[k].norm() * ye[0] / r0;
        }
        Some(Series { val: s.val / 2, coeffs: y, err: ye })
    }

    /// `self^k` for any integer `k`.
    pub fn powi_signed(&self, k: i64, n: usize) -> Option<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut out = Series::real(1.0, n);
        let mut b = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Some(out)
    }

    pub fn powi(&self, k: u32, n: usize) -> Self {
        let mut out = Series::real(1.0, n);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Sum of the known terms at a small parameter value.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = czero();
        for c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc * s.powi(self.val as i32)
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        let val = self.val.min(o.val);
        let prec = self.precision().min(o.precision());
        let n = (prec - val).max(0) as usize;
        let mut coeffs = vec![czero(); n];
        let mut err = vec![0.0; n];
        for s in [self, o] {
            for k in 0..s.len() {
                let idx = s.val + k as i64 - val;
                if idx >= 0 && (idx as usize) < n {
                    coeffs[idx as usize] += s.coeffs[k];
                    err[idx as usize] += s.err[k];
                }
            }
        }
        for (e, c) in err.iter_mut().zip(&coeffs) {
            *e += EPS * c.norm();
        }
        Series { val, coeffs, err }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series {
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            err: self.err.clone(),
        }
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        self + &(-o)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        // relative precision of a product is the smaller one
        let a = self.strip_exact_zeros();
        let b = o.strip_exact_zeros();
        let n = a.len().min(b.len());
        let mut coeffs = vec![czero(); n];
        let mut err = vec![0.0; n];
        let mut mag = vec![0.0; n];
        for i in 0..n {
            let (ai, ae) = (a.coeffs[i], a.err[i]);
            if ai == czero() && ae == 0.0 {
                continue;
            }
            let an = ai.norm();
            for j in 0..n - i {
                let t = ai * b.coeffs[j];
                coeffs[i + j] += t;
                mag[i + j] += t.norm();
                err[i + j] += an * b.err[j] + ae * b.coeffs[j].norm() + ae * b.err[j];
            }
        }
        for k in 0..n {
            err[k] += (k as f64 + 2.0) * EPS * mag[k];
        }
        Series { val: a.val + b.val, coeffs, err }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn geometric_series_inverse() {
        // 1/(1 - s) = 1 + s + s^2 + ...
        let one_minus_s = Series::from_coeffs(0, vec![c(1.0), c(-1.0), c(0.0), c(0.0), c(0.0)]);
        let inv = one_minus_s.inverse().unwrap();
        assert!(inv.coeffs.iter().all(|z| (z - c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn cancellation_is_detected_against_the_error() {
        let a = Series::from_coeffs_with_error(-1, vec![c(1e8), c(3.0), c(1.0)], 1e-15);
        let b = Series::from_coeffs_with_error(-1, vec![c(1e8), c(1.0), c(1.0)], 1e-15);
        let d = &a - &b;
        assert_eq!(d.valuation(), Some(0));
        assert_eq!(d.leading().unwrap().1, c(2.0));
    }

    #[test]
    fn laurent_products() {
        let a = Series::from_coeffs(-2, vec![c(2.0), c(1.0), c(0.0)]);
        let b = Series::from_coeffs(3, vec![c(0.5), c(0.0), c(0.0)]);
        let p = &a * &b;
        assert_eq!(p.valuation(), Some(1));
        assert_eq!(p.leading().unwrap().1, c(1.0));
    }

    #[test]
    fn square_roots() {
        // sqrt(s^-2 (1 - 4 s^2)) has leading term s^-1
        let g = Series::from_coeffs(-2, vec![c(1.0), c(0.0), c(-4.0), c(0.0), c(0.0), c(0.0)]);
        let r = g.sqrt().unwrap();
        assert_eq!(r.val, -1);
        let back = &r * &r;
        for k in 0..back.len() {
            assert!((back.coeffs[k] - g.coeffs[k]).norm() < 1e-14);
        }
        assert!(Series::from_coeffs(1, vec![c(1.0), c(0.0)]).sqrt().is_none());
    }

    #[test]
    fn error_tracks_actual_cancellation() {
        // (1e8 + s)(1e8 - s) - 1e16 = -s^2 exactly
        let a = Series::from_coeffs(0, vec![c(1e8), c(1.0), c(0.0)]);
        let b = Series::from_coeffs(0, vec![c(1e8), c(-1.0), c(0.0)]);
        let d = &(&a * &b) - &Series::real(1e16, 3);
        assert_eq!(d.valuation(), Some(2));
    }
}
