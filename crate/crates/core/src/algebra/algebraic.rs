use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::gcd::squarefree_part;
use super::poly::MultiPoly;
use super::rational::{best_rational, rat, rat_to_f64, Rational};
use super::roots::{aberth, complex_coeffs, polish};
use crate::error::AlgebraError;

/// Element `a + b√d` of a quadratic field; `d` is fixed by context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadElem {
    pub a: Rational,
    pub b: Rational,
}

impl QuadElem {
    pub fn rational(a: Rational) -> Self {
        QuadElem { a, b: Rational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadElem { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn mul(&self, o: &Self, d: &BigInt) -> Self {
        let dr = Rational::from_integer(d.clone());
        QuadElem {
            a: &self.a * &o.a + &self.b * &o.b * dr,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn to_complex(&self, d: &BigInt) -> Complex64 {
        let df = d.to_f64().unwrap();
        let s = if df >= 0.0 {
            Complex64::new(df.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-df).sqrt())
        };
        Complex64::new(rat_to_f64(&self.a), 0.0) + s * rat_to_f64(&self.b)
    }
}

/// Evaluates `f` exactly at a point of `ℚ(√d)^n` (variable-list order).
pub fn eval_quadratic(f: &MultiPoly, point: &[QuadElem], d: &BigInt) -> QuadElem {
    let mut acc = QuadElem::rational(Rational::zero());
    for (m, c) in f.terms() {
        let mut t = QuadElem::rational(c.clone());
        for (x, &k) in point.iter().zip(&m.0) {
            for _ in 0..k {
                t = t.mul(x, d);
            }
        }
        acc = acc.add(&t);
    }
    acc
}

/// An algebraic number, kept exact when it has degree at most two.
#[derive(Clone, Debug)]
pub enum AlgebraicNumber {
    Rational(Rational),
    /// `a + b√d`, `d` squarefree and not 0 or 1, `b ≠ 0`.
    Quadratic { a: Rational, b: Rational, d: BigInt },
    /// Known only numerically, together with an irreducible-looking
    /// integer polynomial it satisfies.
    Numeric { value: Complex64, minpoly: MultiPoly },
}

fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    // n = k^2 * d with d squarefree; trial division suffices for our sizes
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut m = n.abs();
    let mut k = BigInt::one();
    let mut d = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let pp = &p * &p;
        while (&m % &pp).is_zero() {
            m /= &pp;
            k *= &p;
        }
        if (&m % &p).is_zero() {
            m /= &p;
            d *= &p;
        }
        p += 1;
        if p > BigInt::from(1_000_000) {
            break;
        }
    }
    (k, d * m * sign)
}

impl AlgebraicNumber {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            AlgebraicNumber::Rational(r) => Complex64::new(rat_to_f64(r), 0.0),
            AlgebraicNumber::Quadratic { a, b, d } => {
                QuadElem { a: a.clone(), b: b.clone() }.to_complex(d)
            }
            AlgebraicNumber::Numeric { value, .. } => *value,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, AlgebraicNumber::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            AlgebraicNumber::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Field element form `(a, b, d)` for rational and quadratic numbers.
    pub fn as_quadratic(&self) -> Option<(QuadElem, BigInt)> {
        match self {
            AlgebraicNumber::Rational(r) => Some((QuadElem::rational(r.clone()), BigInt::one())),
            AlgebraicNumber::Quadratic { a, b, d } => {
                Some((QuadElem { a: a.clone(), b: b.clone() }, d.clone()))
            }
            AlgebraicNumber::Numeric { .. } => None,
        }
    }

    /// The root of an irreducible factor `f` (univariate in `var`) closest
    /// to `approx`, represented exactly when `deg f ≤ 2`.
    pub fn from_factor(f: &MultiPoly, var: &str, approx: Complex64) -> Result<Self, AlgebraError> {
        let dense = f.normalized().to_dense(var)?;
        match dense.len() {
            0 | 1 => Err(AlgebraError::RootsFailed("constant factor has no roots".into())),
            2 => Ok(AlgebraicNumber::Rational(-&dense[0] / &dense[1])),
            3 => {
                // (-B ± √(B^2 - 4AC)) / 2A
                let (c, b, a) = (&dense[0], &dense[1], &dense[2]);
                let disc = b * b - rat(4, 1) * a * c;
                // disc = p/q → √disc = √(pq)/q
                let pq = disc.numer() * disc.denom();
                let (k, d) = squarefree_decompose(&pq);
                let two_a = rat(2, 1) * a;
                let re = -b / &two_a;
                let coef = Rational::new(k, disc.denom().clone()) / &two_a;
                if d.is_one() {
                    let r1 = &re + &coef;
                    let r2 = &re - &coef;
                    let pick = if (rat_to_f64(&r1) - approx.re).abs() <= (rat_to_f64(&r2) - approx.re).abs() {
                        r1
                    } else {
                        r2
                    };
                    return Ok(AlgebraicNumber::Rational(pick));
                }
                let plus = QuadElem { a: re.clone(), b: coef.clone() }.to_complex(&d);
                let minus = QuadElem { a: re.clone(), b: -coef.clone() }.to_complex(&d);
                let b = if (plus - approx).norm() <= (minus - approx).norm() {
                    coef
                } else {
                    -coef
                };
                Ok(AlgebraicNumber::Quadratic { a: re, b, d })
            }
            _ => Ok(AlgebraicNumber::Numeric {
                value: approx,
                minpoly: f.normalized(),
            }),
        }
    }
}

fn fmt_rat(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraicNumber::Rational(r) => write!(f, "{}", fmt_rat(r)),
            AlgebraicNumber::Quadratic { a, b, d } => {
                let root = format!("sqrt({d})");
                let bpart = if b.abs().is_one() {
                    root
                } else {
                    format!("{}*{root}", fmt_rat(&b.abs()))
                };
                if a.is_zero() {
                    let sign = if b.is_negative() { "-" } else { "" };
                    write!(f, "{sign}{bpart}")
                } else {
                    let sign = if b.is_negative() { "-" } else { "+" };
                    write!(f, "{}{sign}{bpart}", fmt_rat(a))
                }
            }
            AlgebraicNumber::Numeric { value, .. } => {
                if value.im.abs() < 1e-12 {
                    write!(f, "{:.12}", value.re)
                } else {
                    write!(f, "{:.12}{:+.12}i", value.re, value.im)
                }
            }
        }
    }
}

#[derive(Serialize)]
struct AlgebraicJson {
    kind: &'static str,
    display: String,
    re: f64,
    im: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    minpoly: Option<MultiPoly>,
}

impl Serialize for AlgebraicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let z = self.to_complex();
        AlgebraicJson {
            kind: match self {
                AlgebraicNumber::Rational(_) => "rational",
                AlgebraicNumber::Quadratic { .. } => "quadratic",
                AlgebraicNumber::Numeric { .. } => "numeric",
            },
            display: self.to_string(),
            re: z.re,
            im: z.im,
            minpoly: match self {
                AlgebraicNumber::Numeric { minpoly, .. } => Some(minpoly.clone()),
                _ => None,
            },
        }
        .serialize(s)
    }
}

/// Splits a univariate polynomial into rational factors of degree at most
/// two found by pairing numeric roots, plus the unsplit remainder. Every
/// factor is confirmed by exact division, so a miss only leaves more in
/// the remainder.
/// `best_rational` that only answers when the approximation is close.
fn near_rational(x: f64, max_den: u64) -> Option<(i64, u64)> {
    let (p, q) = best_rational(x, max_den)?;
    ((p as f64 / q as f64 - x).abs() <= 1e-9 * (1.0 + x.abs())).then_some((p, q))
}

pub fn low_degree_factors(f: &MultiPoly, var: &str) -> Result<(Vec<MultiPoly>, MultiPoly), AlgebraError> {
    let mut rest = f.normalized();
    let mut found = Vec::new();
    let vars = [var];
    let x = MultiPoly::var(&vars, var);
    let max_den = 1_000_000u64;
    loop {
        let deg = rest.degree_in(var).unwrap_or(0);
        if deg == 0 {
            break;
        }
        // roots of the squarefree part are well conditioned
        let c = complex_coeffs(&squarefree_part(&rest), var)?;
        let rs: Vec<Complex64> = aberth(&c)?.into_iter().map(|z| polish(&c, z)).collect();
        let mut progress = false;
        // linear factors
        for z in &rs {
            if z.im.abs() > 1e-7 * (1.0 + z.norm()) {
                continue;
            }
            if let Some((p, q)) = near_rational(z.re, max_den) {
                let cand = &x.scale(&rat(q as i64, 1)) - &MultiPoly::constant(&vars, rat(p, 1));
                if let Some(qt) = super::modp::may_divide(&cand, &rest, var).then(|| rest.exact_div(&cand)).flatten() {
                    found.push(cand.normalized());
                    rest = qt.normalized();
                    progress = true;
                    break;
                }
            }
        }
        if progress {
            continue;
        }
        'pairs: for i in 0..rs.len() {
            for j in i + 1..rs.len() {
                let s = rs[i] + rs[j];
                let p = rs[i] * rs[j];
                let tol = 1e-7 * (1.0 + s.norm() + p.norm());
                if s.im.abs() > tol || p.im.abs() > tol {
                    continue;
                }
                let (Some((sn, sd)), Some((pn, pd))) =
                    (near_rational(s.re, max_den), near_rational(p.re, max_den))
                else {
                    continue;
                };
                let cand = &(&x.pow(2) - &x.scale(&rat(sn, sd as i64)))
                    + &MultiPoly::constant(&vars, rat(pn, pd as i64));
                if let Some(qt) = super::modp::may_divide(&cand, &rest, var).then(|| rest.exact_div(&cand)).flatten() {
                    found.push(cand.normalized());
                    rest = qt.normalized();
                    progress = true;
                    break 'pairs;
                }
            }
        }
        if !progress {
            break;
        }
    }
    found.sort_by_key(|g| g.to_string());
    Ok((found, rest))
}

/// Exact value of a root of `f` closest to `approx` if it lies in a
/// rational factor of degree at most two.
pub fn recognize_root(f: &MultiPoly, var: &str, approx: Complex64) -> Result<AlgebraicNumber, AlgebraError> {
    let (factors, rest) = low_degree_factors(f, var)?;
    let mut best: Option<(f64, AlgebraicNumber)> = None;
    for g in &factors {
        let c = complex_coeffs(g, var)?;
        for z in aberth(&c)? {
            let d = (z - approx).norm();
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, AlgebraicNumber::from_factor(g, var, z)?));
            }
        }
    }
    if rest.involves(var) {
        // roots of the squarefree part are well conditioned
        let c = complex_coeffs(&squarefree_part(&rest), var)?;
        for z in aberth(&c)? {
            let d = (z - approx).norm();
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, AlgebraicNumber::Numeric { value: polish(&c, z), minpoly: rest.clone() }));
            }
        }
    }
    best.map(|(_, a)| a)
        .ok_or_else(|| AlgebraError::RootsFailed("polynomial has no roots".into()))
}

/// Integer square root if `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    #[test]
    fn quadratic_roots_are_exact() {
        let f = parse_poly("x^2 - 2*x - 1", &["x"]).unwrap();
        let r = AlgebraicNumber::from_factor(&f, "x", Complex64::new(2.4, 0.0)).unwrap();
        assert_eq!(r.to_string(), "1+sqrt(2)");
        let r = AlgebraicNumber::from_factor(&f, "x", Complex64::new(-0.4, 0.0)).unwrap();
        assert_eq!(r.to_string(), "1-sqrt(2)");
        let g = parse_poly("x^2 - 5", &["x"]).unwrap();
        let r = AlgebraicNumber::from_factor(&g, "x", Complex64::new(-2.2, 0.0)).unwrap();
        assert_eq!(r.to_string(), "-sqrt(5)");
    }

    #[test]
    fn splits_products_of_small_factors() {
        let f = parse_poly("(x-1)^2*(x+2)*(x^2-2*x-1)*(x^3-x-1)", &["x"]).unwrap();
        let (factors, rest) = low_degree_factors(&f, "x").unwrap();
        assert_eq!(factors.len(), 4);
        assert_eq!(rest, parse_poly("x^3-x-1", &["x"]).unwrap());
    }

    #[test]
    fn quadratic_field_evaluation() {
        let d = BigInt::from(2);
        let f = parse_poly("x^2 - 2*x - 1", &["x"]).unwrap();
        let r = QuadElem { a: rat(1, 1), b: rat(1, 1) };
        assert!(eval_quadratic(&f, &[r], &d).is_zero());
    }
}
