//! Univariate arithmetic over a prime field, used as a fast squarefreeness
//! filter before exact computation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::poly::MultiPoly;

/// Primes below 2^31 so products fit in u64.
pub const PRIMES: [u64; 6] = [2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549];

fn inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Reduces an integer-coefficient univariate polynomial (constant term
/// first) mod `p`. Returns `None` when the leading coefficient vanishes.
pub fn reduce(coeffs: &[BigInt], p: u64) -> Option<Vec<u64>> {
    let pb = BigInt::from(p);
    let mut v: Vec<u64> = coeffs
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().unwrap())
        .collect();
    if v.last().copied().unwrap_or(0) == 0 {
        return None;
    }
    trim(&mut v);
    Some(v)
}

fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let li = inv(b[db], p);
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let q = r[dr] * li % p;
        for i in 0..=db {
            let s = dr - db + i;
            r[s] = (r[s] + p - q * b[i] % p) % p;
        }
        trim(&mut r);
    }
    r
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

pub fn derivative(a: &[u64], p: u64) -> Vec<u64> {
    let mut d: Vec<u64> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| (i as u64 % p) * c % p)
        .collect();
    trim(&mut d);
    d
}

/// Integer coefficient vector of a univariate polynomial after clearing
/// denominators.
pub fn integer_coeffs(f: &MultiPoly, var: &str) -> Option<Vec<BigInt>> {
    let n = f.normalized();
    let dense = n.to_dense(var).ok()?;
    Some(dense.into_iter().map(|c| c.to_integer()).collect())
}

/// `Some(true)` when `f` is provably squarefree because it is squarefree
/// modulo a prime that keeps its degree; `None` when inconclusive.
pub fn squarefree_mod_p(f: &MultiPoly, var: &str) -> Option<bool> {
    let coeffs = integer_coeffs(f, var)?;
    if coeffs.len() <= 2 {
        return Some(!coeffs.iter().all(Zero::is_zero));
    }
    for &p in PRIMES.iter() {
        let Some(fp) = reduce(&coeffs, p) else { continue };
        let g = gcd(&fp, &derivative(&fp, p), p);
        if g.len() == 1 {
            return Some(true);
        }
    }
    None
}

/// `false` when `d` provably does not divide `f` (both univariate with
/// rational coefficients): the remainder is nonzero modulo a prime that
/// keeps the degree of `d` and the denominators of `f` invertible.
pub fn may_divide(d: &MultiPoly, f: &MultiPoly, var: &str) -> bool {
    let (Some(dc), Some(fc)) = (integer_coeffs(d, var), integer_coeffs(f, var)) else {
        return true;
    };
    for &p in PRIMES.iter().take(2) {
        let (Some(dp), Some(fp)) = (reduce(&dc, p), reduce(&fc, p)) else { continue };
        return rem(&fp, &dp, p).is_empty();
    }
    true
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The largest primes below 2^31, decreasing.
fn primes() -> &'static [u64] {
    static P: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    P.get_or_init(|| (1u64 << 30..1u64 << 31).rev().filter(|&n| n % 2 == 1 && is_prime(n)).take(1024).collect())
}

fn symmetric(x: &BigInt, m: &BigInt) -> BigInt {
    let x = x.mod_floor(m);
    if &x * 2 > *m {
        x - m
    } else {
        x
    }
}

/// gcd of two univariate integer-coefficient polynomials by reduction
/// modulo primes and Chinese remaindering, checked by exact division.
/// `None` if no answer was certified within the prime budget.
pub fn modular_gcd(f: &MultiPoly, g: &MultiPoly, var: &str) -> Option<MultiPoly> {
    let fc = integer_coeffs(f, var)?;
    let gc = integer_coeffs(g, var)?;
    let (lf, lg) = (fc.last()?.clone(), gc.last()?.clone());
    let h = lf.gcd(&lg);
    let vars = f.vars().to_vec();
    let mut acc: Option<(Vec<BigInt>, BigInt)> = None;
    let mut last: Option<Vec<BigInt>> = None;
    for &p in primes() {
        let pb = BigInt::from(p);
        if (&lf % &pb).is_zero() || (&lg % &pb).is_zero() {
            continue;
        }
        let fp = reduce(&fc, p)?;
        let gp = reduce(&gc, p)?;
        let mut d = gcd(&fp, &gp, p);
        if d.len() == 1 {
            return Some(MultiPoly::one(&vars));
        }
        let li = inv(*d.last().unwrap(), p);
        let hp = (&h % &pb).mod_floor(&pb).to_u64().unwrap();
        for c in d.iter_mut() {
            *c = *c * li % p * hp % p;
        }
        match &mut acc {
            Some((cur, _)) if cur.len() < d.len() => continue,
            Some((cur, m)) if cur.len() == d.len() => {
                let minv = inv((&*m % &pb).to_u64().unwrap(), p);
                for (a, r) in cur.iter_mut().zip(&d) {
                    let am = a.mod_floor(&pb).to_u64().unwrap();
                    let t = (r + p - am) % p * minv % p;
                    *a = &*a + &*m * BigInt::from(t);
                }
                *m *= &pb;
            }
            _ => {
                acc = Some((d.iter().map(|&c| BigInt::from(c)).collect(), pb.clone()));
                last = None;
                continue;
            }
        }
        let (cur, m) = acc.as_ref().unwrap();
        let cand: Vec<BigInt> = cur.iter().map(|a| symmetric(a, m)).collect();
        if last.as_ref() == Some(&cand) {
            let poly = MultiPoly::from_terms(
                &vars,
                cand.iter().enumerate().map(|(k, c)| {
                    let mut e = vec![0u32; vars.len()];
                    e[f.var_index(var).unwrap()] = k as u32;
                    (e, super::rational::Rational::from_integer(c.clone()))
                }),
            )
            .normalized();
            if f.exact_div(&poly).is_some() && g.exact_div(&poly).is_some() {
                return Some(poly);
            }
        }
        last = Some(cand);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    #[test]
    fn modular_gcd_matches_known_factor() {
        let a = parse_poly("(3*x^2 - 7*x + 100000007)*(x^3 + 2)", &["x"]).unwrap();
        let b = parse_poly("(3*x^2 - 7*x + 100000007)*(5*x - 1)^2", &["x"]).unwrap();
        let g = modular_gcd(&a, &b, "x").unwrap();
        assert_eq!(g, parse_poly("3*x^2 - 7*x + 100000007", &["x"]).unwrap().normalized());
        let c = parse_poly("x^4 + 1", &["x"]).unwrap();
        assert!(modular_gcd(&a, &c, "x").unwrap().is_constant());
    }

    #[test]
    fn detects_squarefree() {
        let f = parse_poly("x^5 - 3*x^2 + 7", &["x"]).unwrap();
        assert_eq!(squarefree_mod_p(&f, "x"), Some(true));
        let g = parse_poly("(x-1)^2*(x+3)", &["x"]).unwrap();
        assert_eq!(squarefree_mod_p(&g, "x"), None);
    }
}
