use num_traits::One;

use super::poly::{Monomial, MultiPoly};
use super::rational::Rational;
use crate::error::AlgebraError;

/// Result of dividing `f` by `g` as polynomials in one variable.
#[derive(Clone, Debug)]
pub struct Division {
    pub quotient: MultiPoly,
    pub remainder: MultiPoly,
    /// Power of `lc(g)` that `f` was multiplied by before dividing.
    /// Zero means an ordinary division took place.
    pub lc_power: u32,
}

fn var_power(vars: &[String], var: &str, k: u32) -> Vec<u32> {
    vars.iter().map(|v| if v == var { k } else { 0 }).collect()
}

/// Divides `f` by `g` with respect to `var`.
///
/// When the leading coefficient of `g` in `var` is a rational constant the
/// division is ordinary. Otherwise, and always when `pseudo` is set, it is
/// a pseudo-division: `lc(g)^k f = q g + r` with `deg r < deg g`.
pub fn divide_in(
    f: &MultiPoly,
    g: &MultiPoly,
    var: &str,
    pseudo: bool,
) -> Result<Division, AlgebraError> {
    if g.is_zero() {
        return Err(AlgebraError::DivisionByZero);
    }
    let (mut r, g) = MultiPoly::unify(f, g);
    let vars = r.vars().to_vec();
    if r.var_index(var).is_none() {
        // neither involves var: g is a "constant" in var
        let mut vv = vars.clone();
        vv.push(var.to_string());
        return divide_in(&r.with_vars(&vv)?, &g.with_vars(&vv)?, var, pseudo);
    }
    let dg = g.degree_in(var).unwrap_or(0);
    let lc = g.lc_in(var);
    let lc_const = lc.constant_value();
    let mut q = MultiPoly::zero(&vars);
    let mut k = 0u32;
    match (&lc_const, pseudo) {
        (Some(c), false) => {
            let inv = Rational::one() / c;
            while !r.is_zero() && r.degree_in(var).unwrap() >= dg {
                let dr = r.degree_in(var).unwrap();
                let t = r.lc_in(var).scale(&inv);
                let shift = var_power(&vars, var, dr - dg);
                let t = t.mul_monomial(&shift, &Rational::one());
                r = &r - &(&t * &g);
                q = &q + &t;
            }
        }
        _ => {
            while !r.is_zero() && r.degree_in(var).unwrap() >= dg {
                let dr = r.degree_in(var).unwrap();
                let t = r
                    .lc_in(var)
                    .mul_monomial(&var_power(&vars, var, dr - dg), &Rational::one());
                r = &(&lc * &r) - &(&t * &g);
                q = &(&lc * &q) + &t;
                k += 1;
            }
        }
    }
    Ok(Division {
        quotient: q,
        remainder: r,
        lc_power: k,
    })
}

/// Remainder of `f` modulo `g` in `var`; requires a constant leading
/// coefficient of `g` in `var`.
pub fn reduce_mod(f: &MultiPoly, g: &MultiPoly, var: &str) -> Result<MultiPoly, AlgebraError> {
    if g.lc_in(var).constant_value().is_none() {
        return Err(AlgebraError::NonConstantLeading(var.to_string()));
    }
    Ok(divide_in(f, g, var, false)?.remainder)
}

/// Pseudo-remainder of `f` by `g` in `var`.
pub fn pseudo_rem(f: &MultiPoly, g: &MultiPoly, var: &str) -> Result<MultiPoly, AlgebraError> {
    Ok(divide_in(f, g, var, true)?.remainder)
}

/// Removes the largest power of each variable dividing every term.
pub fn strip_monomial(f: &MultiPoly) -> MultiPoly {
    if f.is_zero() {
        return f.clone();
    }
    let n = f.vars().len();
    let mut mins = vec![u32::MAX; n];
    for (m, _) in f.terms() {
        for (i, &e) in m.0.iter().enumerate() {
            mins[i] = mins[i].min(e);
        }
    }
    if mins.iter().all(|&e| e == 0) {
        return f.clone();
    }
    MultiPoly::from_terms(
        f.vars(),
        f.terms().map(|(m, c)| {
            (
                m.0.iter().zip(&mins).map(|(a, b)| a - b).collect::<Vec<u32>>(),
                c.clone(),
            )
        }),
    )
}

/// Returns the exponent vector of `f` if it is a single term.
pub fn as_monomial(f: &MultiPoly) -> Option<(Monomial, Rational)> {
    if f.num_terms() == 1 {
        f.terms().next().map(|(m, c)| (m.clone(), c.clone()))
    } else {
        None
    }
}

/// True when `g` divides `f` exactly.
pub fn divides(g: &MultiPoly, f: &MultiPoly) -> bool {
    if f.is_zero() {
        return true;
    }
    if g.is_zero() {
        return false;
    }
    f.exact_div(g).is_some()
}

/// Largest `k` with `g^k | f`, for non-constant `g`.
pub fn multiplicity_of(g: &MultiPoly, f: &MultiPoly) -> (u32, MultiPoly) {
    let mut k = 0;
    let mut cur = f.clone();
    if g.is_constant() || cur.is_zero() {
        return (0, cur);
    }
    while let Some(q) = cur.exact_div(g) {
        cur = q;
        k += 1;
        if cur.is_constant() && !cur.is_zero() {
            break;
        }
    }
    (k, cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    #[test]
    fn pseudo_division_identity() {
        let vars = ["x", "y"];
        let f = parse_poly("x^3*y + x*y^2 - 7", &vars).unwrap();
        let g = parse_poly("y*x^2 + x - 1", &vars).unwrap();
        let d = divide_in(&f, &g, "x", true).unwrap();
        let lhs = &g.lc_in("x").pow(d.lc_power) * &f;
        let rhs = &(&d.quotient * &g) + &d.remainder;
        assert_eq!(lhs, rhs);
        assert!(d.remainder.degree_in("x").unwrap() < 2);
    }

    #[test]
    fn ordinary_division_with_constant_lc() {
        let vars = ["x", "z"];
        let f = parse_poly("z^3 + x*z + 1", &vars).unwrap();
        let g = parse_poly("2*z^2 - x", &vars).unwrap();
        let d = divide_in(&f, &g, "z", false).unwrap();
        assert_eq!(d.lc_power, 0);
        assert_eq!(&(&d.quotient * &g) + &d.remainder, f);
    }

    #[test]
    fn monomial_stripping() {
        let f = parse_poly("m^3*l^2 + m^5*l", &["m", "l"]).unwrap();
        assert_eq!(strip_monomial(&f), parse_poly("l + m^2", &["m", "l"]).unwrap());
    }
}
