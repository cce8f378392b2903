use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{rat_to_f64, Rational};
use crate::error::AlgebraError;

/// Exponent vector, one entry per variable of the owning polynomial.
///
/// Ordered graded-lexicographically: total degree first, then the
/// exponent of the earliest variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over the rationals.
///
/// Zero coefficients are never stored. The variable list is part of the
/// value; binary operations merge the lists (left operand's order first).
#[derive(Clone, Debug)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero<S: AsRef<str>>(vars: &[S]) -> Self {
        MultiPoly {
            vars: vars.iter().map(|v| v.as_ref().to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<S: AsRef<str>>(vars: &[S], c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            let n = p.vars.len();
            p.terms.insert(Monomial(vec![0; n]), c);
        }
        p
    }

    pub fn from_int<S: AsRef<str>>(vars: &[S], c: i64) -> Self {
        Self::constant(vars, Rational::from_integer(BigInt::from(c)))
    }

    pub fn one<S: AsRef<str>>(vars: &[S]) -> Self {
        Self::from_int(vars, 1)
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var<S: AsRef<str>>(vars: &[S], name: &str) -> Self {
        let mut p = Self::zero(vars);
        let idx = p
            .var_index(name)
            .unwrap_or_else(|| panic!("variable {name} not in variable list"));
        let mut e = vec![0; p.vars.len()];
        e[idx] = 1;
        p.terms.insert(Monomial(e), Rational::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; zero
    /// coefficients are dropped and repeated monomials are summed.
    pub fn from_terms<S: AsRef<str>, I>(vars: &[S], terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent length mismatch");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// Constant term value if the polynomial is constant.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial(vec![0; self.vars.len()]))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Degree in one variable; `None` for the zero polynomial, `Some(0)`
    /// when the variable is absent from the list.
    pub fn degree_in(&self, var: &str) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        match self.var_index(var) {
            Some(i) => self.terms.keys().map(|m| m.0[i]).max(),
            None => Some(0),
        }
    }

    /// Names of variables that actually occur.
    pub fn used_vars(&self) -> Vec<String> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| self.terms.keys().any(|m| m.0[*i] > 0))
            .map(|(_, v)| v.clone())
            .collect()
    }

    pub fn involves(&self, var: &str) -> bool {
        self.degree_in(var).map_or(false, |d| d > 0)
    }

    /// Leading term under graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Re-expresses the polynomial over a different variable list. Fails if
    /// a variable that occurs is missing from `new_vars`.
    pub fn with_vars<S: AsRef<str>>(&self, new_vars: &[S]) -> Result<Self, AlgebraError> {
        let new_vars: Vec<String> = new_vars.iter().map(|v| v.as_ref().to_string()).collect();
        if new_vars == self.vars {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match new_vars.iter().position(|w| w == v) {
                Some(j) => map.push(Some(j)),
                None => {
                    if self.terms.keys().any(|m| m.0[i] > 0) {
                        return Err(AlgebraError::UnknownVariable(v.clone()));
                    }
                    map.push(None);
                }
            }
        }
        let mut out = MultiPoly::zero(&new_vars);
        for (m, c) in &self.terms {
            let mut e = vec![0; new_vars.len()];
            for (i, j) in map.iter().enumerate() {
                if let Some(j) = j {
                    e[*j] = m.0[i];
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Drops variables that do not occur.
    pub fn trimmed(&self) -> Self {
        let used = self.used_vars();
        self.with_vars(&used).expect("used variables are kept")
    }

    pub fn rename(&self, from: &str, to: &str) -> Self {
        let mut p = self.clone();
        for v in p.vars.iter_mut() {
            if v == from {
                *v = to.to_string();
            }
        }
        p
    }

    fn merged_vars(&self, other: &Self) -> Vec<String> {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars
    }

    /// Brings two polynomials onto a common variable list.
    pub fn unify(a: &Self, b: &Self) -> (Self, Self) {
        if a.vars == b.vars {
            return (a.clone(), b.clone());
        }
        let vars = a.merged_vars(b);
        (
            a.with_vars(&vars).expect("superset"),
            b.with_vars(&vars).expect("superset"),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&Rational::from_integer(BigInt::from(c)))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = MultiPoly::one(&self.vars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Multiplies by a monomial given as exponent vector.
    pub fn mul_monomial(&self, e: &[u32], c: &Rational) -> Self {
        let mut out = MultiPoly::zero(&self.vars);
        for (m, v) in &self.terms {
            let ne: Vec<u32> = m.0.iter().zip(e).map(|(a, b)| a + b).collect();
            out.terms.insert(Monomial(ne), v * c);
        }
        out
    }

    /// Coefficients with respect to `var`, lowest power first. Each
    /// coefficient keeps the full variable list with `var` at exponent 0.
    pub fn coeffs_in(&self, var: &str) -> Vec<MultiPoly> {
        let Some(idx) = self.var_index(var) else {
            return vec![self.clone()];
        };
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![MultiPoly::zero(&self.vars); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[idx] as usize;
            let mut e = m.0.clone();
            e[idx] = 0;
            out[k].terms.insert(Monomial(e), c.clone());
        }
        out
    }

    /// Inverse of [`coeffs_in`](Self::coeffs_in).
    pub fn from_coeffs_in(var: &str, coeffs: &[MultiPoly]) -> Self {
        let vars = coeffs
            .iter()
            .fold(vec![var.to_string()], |acc, c| {
                let mut acc = acc;
                for v in c.vars() {
                    if !acc.contains(v) {
                        acc.push(v.clone());
                    }
                }
                acc
            });
        // keep the coefficient order if it already contains var
        let vars = match coeffs.first() {
            Some(c) if c.var_index(var).is_some() => {
                let mut v = c.vars.clone();
                for extra in &vars {
                    if !v.contains(extra) {
                        v.push(extra.clone());
                    }
                }
                v
            }
            _ => vars,
        };
        let idx = vars.iter().position(|v| v == var).unwrap();
        let mut out = MultiPoly::zero(&vars);
        for (k, c) in coeffs.iter().enumerate() {
            let c = c.with_vars(&vars).expect("superset");
            for (m, v) in c.terms {
                let mut e = m.0;
                e[idx] += k as u32;
                out.add_term(Monomial(e), v);
            }
        }
        out
    }

    /// Leading coefficient with respect to `var` (a polynomial in the others).
    pub fn lc_in(&self, var: &str) -> MultiPoly {
        self.coeffs_in(var)
            .pop()
            .unwrap_or_else(|| MultiPoly::zero(&self.vars))
    }

    pub fn derivative(&self, var: &str) -> Self {
        let Some(idx) = self.var_index(var) else {
            return MultiPoly::zero(&self.vars);
        };
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let k = m.0[idx];
            if k == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[idx] -= 1;
            out.add_term(Monomial(e), c * Rational::from_integer(BigInt::from(k)));
        }
        out
    }

    /// Substitution homomorphism. Unbound variables are kept. The result's
    /// variable list is the unbound variables followed by any variables of
    /// the bound images.
    pub fn substitute(&self, bindings: &HashMap<String, MultiPoly>) -> Self {
        let mut out_vars: Vec<String> = self
            .vars
            .iter()
            .filter(|v| !bindings.contains_key(*v))
            .cloned()
            .collect();
        for v in &self.vars {
            if let Some(b) = bindings.get(v) {
                for w in b.vars() {
                    if !out_vars.contains(w) {
                        out_vars.push(w.clone());
                    }
                }
            }
        }
        let images: Vec<MultiPoly> = self
            .vars
            .iter()
            .map(|v| match bindings.get(v) {
                Some(b) => b.with_vars(&out_vars).expect("superset"),
                None => MultiPoly::var(&out_vars, v),
            })
            .collect();
        let mut cache: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|p| vec![MultiPoly::one(&out_vars), p.clone()])
            .collect();
        let mut out = MultiPoly::zero(&out_vars);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(&out_vars, c.clone());
            for (i, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = &cache[i][cache[i].len() - 1] * &images[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][k as usize];
            }
            out = &out + &t;
        }
        out
    }

    pub fn substitute_one(&self, var: &str, value: &MultiPoly) -> Self {
        let mut b = HashMap::new();
        b.insert(var.to_string(), value.clone());
        self.substitute(&b)
    }

    /// Evaluates at a complex point given in variable-list order.
    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.vars.len(), "point dimension mismatch");
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(rat_to_f64(c), 0.0);
            for (x, &k) in point.iter().zip(&m.0) {
                if k > 0 {
                    t *= x.powu(k);
                }
            }
            acc += t;
        }
        acc
    }

    /// Sum of absolute term values at a point; the natural scale for
    /// judging the size of [`eval_complex`](Self::eval_complex).
    pub fn eval_abs_scale(&self, point: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rat_to_f64(c).abs();
            for (x, &k) in point.iter().zip(&m.0) {
                if k > 0 {
                    t *= x.norm().powi(k as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluates at named values; unlisted variables must not occur.
    pub fn eval_complex_named(&self, values: &[(&str, Complex64)]) -> Complex64 {
        let point: Vec<Complex64> = self
            .vars
            .iter()
            .map(|v| {
                values
                    .iter()
                    .find(|(n, _)| *n == v)
                    .map(|(_, x)| *x)
                    .unwrap_or(Complex64::new(f64::NAN, 0.0))
            })
            .collect();
        let point: Vec<Complex64> = point
            .into_iter()
            .enumerate()
            .map(|(i, x)| {
                if x.re.is_nan() && !self.terms.keys().any(|m| m.0[i] > 0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    x
                }
            })
            .collect();
        self.eval_complex(&point)
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len(), "point dimension mismatch");
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&m.0) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Univariate coefficient vector (constant term first) in `var`; every
    /// other variable must be absent.
    pub fn to_dense(&self, var: &str) -> Result<Vec<Rational>, AlgebraError> {
        for u in self.used_vars() {
            if u != var {
                return Err(AlgebraError::NotUnivariate(self.to_string()));
            }
        }
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Rational::zero(); deg + 1];
        let idx = self.var_index(var);
        for (m, c) in &self.terms {
            let k = idx.map_or(0, |i| m.0[i] as usize);
            out[k] = c.clone();
        }
        Ok(out)
    }

    pub fn from_dense(var: &str, coeffs: &[Rational]) -> Self {
        let mut p = MultiPoly::zero(&[var]);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial(vec![k as u32]), c.clone());
        }
        p
    }

    /// The single variable a univariate polynomial lives in, if any.
    pub fn main_var(&self) -> Option<String> {
        let used = self.used_vars();
        match used.len() {
            1 => used.into_iter().next(),
            _ => None,
        }
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Clears denominators, removes the integer content and makes the
    /// graded-lex leading coefficient positive.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lcm = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .terms
            .values()
            .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if self.leading_coefficient().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let factor = Rational::new(lcm * sign, g);
        self.scale(&factor)
    }

    /// Divides by the graded-lex leading coefficient.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading_coefficient();
        self.scale(&(Rational::one() / lc))
    }

    /// Exact multivariate division; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &MultiPoly) -> Option<MultiPoly> {
        if d.is_zero() {
            return None;
        }
        let (mut r, d) = MultiPoly::unify(self, d);
        let mut q = MultiPoly::zero(&r.vars);
        let (dm, dc) = {
            let (m, c) = d.leading_term().unwrap();
            (m.clone(), c.clone())
        };
        while let Some((m, c)) = r.leading_term() {
            if m.0.iter().zip(&dm.0).any(|(a, b)| a < b) {
                return None;
            }
            let e: Vec<u32> = m.0.iter().zip(&dm.0).map(|(a, b)| a - b).collect();
            let coef = c / &dc;
            q.add_term(Monomial(e.clone()), coef.clone());
            r = &r - &d.mul_monomial(&e, &coef);
        }
        Some(q)
    }
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            self.terms == other.terms
        } else {
            (self - other).is_zero()
        }
    }
}

impl Eq for MultiPoly {}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &'a MultiPoly) -> MultiPoly {
        if self.vars == rhs.vars {
            let mut out = self.clone();
            for (m, c) in &rhs.terms {
                out.add_term(m.clone(), c.clone());
            }
            out
        } else {
            let (a, b) = MultiPoly::unify(self, rhs);
            &a + &b
        }
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &'a MultiPoly) -> MultiPoly {
        if self.vars == rhs.vars {
            let mut out = self.clone();
            for (m, c) in &rhs.terms {
                out.add_term(m.clone(), -c.clone());
            }
            out
        } else {
            let (a, b) = MultiPoly::unify(self, rhs);
            &a - &b
        }
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &'a MultiPoly) -> MultiPoly {
        if self.vars != rhs.vars {
            let (a, b) = MultiPoly::unify(self, rhs);
            return &a * &b;
        }
        let mut out = MultiPoly::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let e: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(Monomial(e), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: &'a MultiPoly) -> MultiPoly {
                (&self).$f(rhs)
            }
        }
        impl<'a> $tr<MultiPoly> for &'a MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly {
                self.$f(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mono: Vec<String> = m
                .0
                .iter()
                .zip(&self.vars)
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            let neg = c.is_negative();
            let abs = c.abs();
            let body = if mono.is_empty() {
                fmt_rational(&abs)
            } else if abs.is_one() {
                mono.join("*")
            } else {
                format!("{}*{}", fmt_rational(&abs), mono.join("*"))
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                write!(f, "{body}")?;
                first = false;
            } else {
                write!(f, " {} {body}", if neg { "-" } else { "+" })?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    vars: Vec<String>,
    terms: Vec<TermJson>,
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(m, c)| TermJson {
                    exp: m.0.clone(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let pj = PolyJson::deserialize(d)?;
        let mut p = MultiPoly::zero(&pj.vars);
        for t in pj.terms {
            if t.exp.len() != pj.vars.len() {
                return Err(D::Error::custom("exponent length does not match vars"));
            }
            let num: BigInt = t.num.parse().map_err(D::Error::custom)?;
            let den: BigInt = t.den.parse().map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            p.add_term(Monomial(t.exp), Rational::new(num, den));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    fn p(s: &str, vars: &[&str]) -> MultiPoly {
        parse_poly(s, vars).unwrap()
    }

    #[test]
    fn grlex_leading_term() {
        let f = p("x^2 - z^3 + x*z", &["x", "z"]);
        let (m, c) = f.leading_term().unwrap();
        assert_eq!(m.0, vec![0, 3]);
        assert_eq!(*c, Rational::from_integer((-1).into()));
    }

    #[test]
    fn normalization_is_canonical() {
        let f = p("-1/2*x^2 + 3/4*z", &["x", "z"]);
        assert_eq!(f.normalized().to_string(), "2*x^2 - 3*z");
    }

    #[test]
    fn substitution() {
        let f = p("x*y - z", &["x", "y", "z"]);
        let g = f.substitute_one("y", &MultiPoly::var(&["x"], "x"));
        assert_eq!(g, p("x^2 - z", &["x", "z"]));
    }

    #[test]
    fn exact_division() {
        let f = p("z^2 - 1", &["z"]);
        let g = p("z - 1", &["z"]);
        assert_eq!(f.exact_div(&g).unwrap(), p("z + 1", &["z"]));
        assert!(f.exact_div(&p("z - 2", &["z"])).is_none());
    }

    #[test]
    fn json_round_trip_keeps_exact_coefficients() {
        let f = p("12345678901234567890/7*x^3*z - z + 1", &["x", "z"]);
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"num\":\"12345678901234567890\""));
        let g: MultiPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn coefficient_split_round_trip() {
        let f = p("x^2*z - 3*z^2 + x + 7", &["x", "z"]);
        let cs = f.coeffs_in("z");
        assert_eq!(cs.len(), 3);
        assert_eq!(MultiPoly::from_coeffs_in("z", &cs), f);
    }
}
