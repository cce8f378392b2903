use num_complex::Complex64;
use serde::Serialize;

use super::gcd::yun;
use super::poly::MultiPoly;
use super::rational::rat_to_f64;
use crate::error::AlgebraError;

#[derive(Clone, Debug, Serialize)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: u32,
    /// Relative backward error `|p(z)| / Σ|a_i||z|^i` of the squarefree
    /// factor the root was computed from.
    pub residual: f64,
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Newton correction `p(z)/p'(z)`, evaluated on the reversed polynomial
/// outside the unit disk to avoid overflow.
fn newton_ratio(c: &[Complex64], rev: &[Complex64], z: Complex64) -> Complex64 {
    let n = (c.len() - 1) as f64;
    if z.norm() <= 1.0 {
        let (p, dp) = horner(c, z);
        p / dp
    } else {
        let y = z.inv();
        let (q, dq) = horner(rev, y);
        z / (Complex64::new(n, 0.0) - y * dq / q)
    }
}

/// Relative backward error of `z` as a root of `c`.
pub fn backward_error(c: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let (val, scale) = if r <= 1.0 {
        let (p, _) = horner(c, z);
        let s: f64 = c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm());
        (p.norm(), s)
    } else {
        let rev: Vec<Complex64> = c.iter().rev().cloned().collect();
        let y = z.inv();
        let (q, _) = horner(&rev, y);
        let s: f64 = rev.iter().rev().fold(0.0, |acc, a| acc * (1.0 / r) + a.norm());
        (q.norm(), s)
    };
    if scale == 0.0 {
        0.0
    } else {
        val / scale
    }
}

/// All complex roots of a polynomial with complex coefficients (constant
/// term first) by Aberth–Ehrlich iteration. Leading zeros are ignored.
pub fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>, AlgebraError> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().map_or(false, |a| a.norm() == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    // zero roots
    let mut zeros = 0;
    while c[0].norm() == 0.0 {
        c.remove(0);
        zeros += 1;
    }
    let n = c.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    if n == 0 {
        return Ok(out);
    }
    let scale = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
    for a in c.iter_mut() {
        *a /= scale;
    }
    if n == 1 {
        out.push(-c[0] / c[1]);
        return Ok(out);
    }
    let rev: Vec<Complex64> = c.iter().rev().cloned().collect();
    // initial radius from the geometric mean of root moduli
    let lead = c[n].norm();
    let radius = (c[0].norm() / lead).powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; n];
    let tol = 4.0 * f64::EPSILON * n as f64;
    for _iter in 0..1000 {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let w = newton_ratio(&c, &rev, z[i]);
            if !w.re.is_finite() || !w.im.is_finite() {
                // landed on a critical point; nudge
                let bump = Complex64::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                z[i] += bump;
                all = false;
                continue;
            }
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            z[i] -= step;
            if backward_error(&c, z[i]) <= tol || step.norm() <= f64::EPSILON * z[i].norm() {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            out.extend(z);
            return Ok(out);
        }
    }
    let worst = z
        .iter()
        .map(|r| backward_error(&c, *r))
        .fold(0.0, f64::max);
    if worst < 1e-10 {
        out.extend(z);
        Ok(out)
    } else {
        Err(AlgebraError::RootsFailed(format!(
            "degree {n}, worst backward error {worst:.2e}"
        )))
    }
}

/// A few Newton steps on the original polynomial.
pub fn polish(c: &[Complex64], z: Complex64) -> Complex64 {
    let rev: Vec<Complex64> = c.iter().rev().cloned().collect();
    let mut z = z;
    let mut err = backward_error(c, z);
    for _ in 0..5 {
        let w = newton_ratio(c, &rev, z);
        if !w.re.is_finite() || !w.im.is_finite() {
            break;
        }
        let cand = z - w;
        let e = backward_error(c, cand);
        if e < err {
            z = cand;
            err = e;
        } else {
            break;
        }
    }
    z
}

/// Complex coefficients (constant term first) of a univariate polynomial.
pub fn complex_coeffs(f: &MultiPoly, var: &str) -> Result<Vec<Complex64>, AlgebraError> {
    let f = f.normalized();
    let dense = f.to_dense(var)?;
    Ok(dense
        .iter()
        .map(|c| Complex64::new(rat_to_f64(c), 0.0))
        .collect())
}

/// Roots of a univariate rational polynomial with exact multiplicities,
/// obtained from its squarefree decomposition.
pub fn roots(f: &MultiPoly, var: &str) -> Result<Vec<Root>, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::RootsFailed("zero polynomial".into()));
    }
    let mut out = Vec::new();
    for (factor, mult) in yun(f, var) {
        let c = complex_coeffs(&factor, var)?;
        for z in aberth(&c)? {
            let z = polish(&c, z);
            out.push(Root {
                value: z,
                multiplicity: mult,
                residual: backward_error(&c, z),
            });
        }
    }
    out.sort_by(|a, b| {
        a.value
            .re
            .partial_cmp(&b.value.re)
            .unwrap()
            .then(a.value.im.partial_cmp(&b.value.im).unwrap())
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    #[test]
    fn multiplicities_and_values() {
        let f = parse_poly("(x-1)^2*(x^2+1)*(x+3)^3", &["x"]).unwrap();
        let r = roots(&f, "x").unwrap();
        assert_eq!(r.len(), 4);
        assert!((r[0].value - Complex64::new(-3.0, 0.0)).norm() < 1e-12);
        assert_eq!(r[0].multiplicity, 3);
        assert_eq!(r[3].multiplicity, 2);
        assert!(r.iter().all(|x| x.residual < 1e-14));
    }

    #[test]
    fn wilkinson_like_degree_twelve() {
        let mut f = parse_poly("1", &["x"]).unwrap();
        for k in 1..=12 {
            f = &f * &parse_poly(&format!("x - {k}"), &["x"]).unwrap();
        }
        let r = roots(&f, "x").unwrap();
        for (k, root) in r.iter().enumerate() {
            assert!((root.value.re - (k + 1) as f64).abs() < 1e-6, "{:?}", root.value);
        }
    }
}
