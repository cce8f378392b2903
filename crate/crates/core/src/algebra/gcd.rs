//! Multivariate gcd over the rationals by recursive primitive remainder
//! sequences, plus squarefree parts and Yun's decomposition.

use super::divide::pseudo_rem;
use super::poly::MultiPoly;
use super::rational::Rational;

/// Content of `f` with respect to `var`: the gcd of its coefficients.
pub fn content_in(f: &MultiPoly, var: &str) -> MultiPoly {
    let coeffs = f.coeffs_in(var);
    let mut g = MultiPoly::zero(f.vars());
    for c in coeffs.iter().rev() {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, c);
        if g.is_constant() {
            return MultiPoly::one(f.vars());
        }
    }
    g
}

/// `f` divided by its content in `var`, normalized.
pub fn primitive_part_in(f: &MultiPoly, var: &str) -> MultiPoly {
    if f.is_zero() {
        return f.clone();
    }
    let c = content_in(f, var);
    f.exact_div(&c)
        .expect("content divides the polynomial")
        .normalized()
}

fn pick_main_var(f: &MultiPoly, g: &MultiPoly) -> Option<(String, bool)> {
    let fu = f.used_vars();
    let gu = g.used_vars();
    let common: Vec<&String> = fu.iter().filter(|v| gu.contains(v)).collect();
    if let Some(v) = common
        .iter()
        .min_by_key(|v| f.degree_in(v).unwrap().max(g.degree_in(v).unwrap()))
    {
        return Some(((*v).clone(), true));
    }
    fu.first().or(gu.first()).map(|v| (v.clone(), false))
}

/// Greatest common divisor, normalized (integer coefficients, content 1,
/// positive leading coefficient). `gcd(0, 0) = 0`.
pub fn gcd(f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
    let (f, g) = MultiPoly::unify(f, g);
    if f.is_zero() {
        return g.normalized();
    }
    if g.is_zero() {
        return f.normalized();
    }
    if f.is_constant() || g.is_constant() {
        return MultiPoly::one(f.vars());
    }
    let Some((var, shared)) = pick_main_var(&f, &g) else {
        return MultiPoly::one(f.vars());
    };
    if shared && f.used_vars().len() == 1 && g.used_vars().len() == 1 {
        if let Some(h) = super::modp::modular_gcd(&f, &g, &var) {
            return h;
        }
    }
    if !shared {
        // var occurs in only one argument: its content carries the gcd
        let (with, without) = if f.involves(&var) { (&f, &g) } else { (&g, &f) };
        return gcd(&content_in(with, &var), without);
    }
    let cf = content_in(&f, &var);
    let cg = content_in(&g, &var);
    let c = gcd(&cf, &cg);
    let mut a = f.exact_div(&cf).unwrap().normalized();
    let mut b = g.exact_div(&cg).unwrap().normalized();
    if a.degree_in(&var) < b.degree_in(&var) {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() && b.involves(&var) {
        let r = pseudo_rem(&a, &b, &var).expect("nonzero divisor");
        a = b;
        b = if r.is_zero() { r } else { primitive_part_in(&r, &var) };
    }
    let core = if b.is_zero() {
        primitive_part_in(&a, &var)
    } else {
        // remainder free of var: primitive parts are coprime in var
        MultiPoly::one(f.vars())
    };
    (&c * &core).normalized()
}

/// gcd of a list; the empty list gives zero over `vars`.
pub fn gcd_many<S: AsRef<str>>(vars: &[S], polys: &[MultiPoly]) -> MultiPoly {
    polys
        .iter()
        .fold(MultiPoly::zero(vars), |acc, p| gcd(&acc, p))
}

/// `f / gcd(f, ∂f/∂var)`: removes repeated factors that involve `var`.
pub fn squarefree_part_in(f: &MultiPoly, var: &str) -> MultiPoly {
    if f.is_zero() || !f.involves(var) {
        return f.normalized();
    }
    let d = f.derivative(var);
    let g = gcd(f, &d);
    f.exact_div(&g).expect("gcd divides").normalized()
}

/// Squarefree part with respect to all variables: `f / gcd(f, ∇f)`.
pub fn squarefree_part(f: &MultiPoly) -> MultiPoly {
    if f.is_zero() || f.is_constant() {
        return f.normalized();
    }
    let mut g = f.clone();
    for v in f.used_vars() {
        g = gcd(&g, &f.derivative(&v));
        if g.is_constant() {
            break;
        }
    }
    f.exact_div(&g).expect("gcd divides").normalized()
}

/// Yun's squarefree decomposition in `var`: returns `(factor, multiplicity)`
/// pairs with pairwise coprime, squarefree, non-constant factors. Factors of
/// `f` not involving `var` are dropped.
pub fn yun(f: &MultiPoly, var: &str) -> Vec<(MultiPoly, u32)> {
    let mut out = Vec::new();
    if f.is_zero() || !f.involves(var) {
        return out;
    }
    let f = primitive_part_in(f, var);
    let fp = f.derivative(var);
    let a0 = gcd(&f, &fp);
    let mut b = f.exact_div(&a0).unwrap();
    let c = fp.exact_div(&a0).unwrap();
    let mut d = &c - &b.derivative(var);
    let mut i = 1;
    while b.involves(var) {
        let a = gcd(&b, &d);
        if a.involves(var) {
            out.push((a.normalized(), i));
        }
        let nb = b.exact_div(&a).unwrap();
        let c = d.exact_div(&a).unwrap();
        d = &c - &nb.derivative(var);
        b = nb;
        i += 1;
    }
    out
}

/// True when `f` is squarefree as a polynomial in `var`.
pub fn is_squarefree_in(f: &MultiPoly, var: &str) -> bool {
    !f.is_zero() && !gcd(f, &f.derivative(var)).involves(var)
}

/// Rescales so that the leading coefficient in `var` is 1 (rational
/// coefficients); for univariate polynomials only.
pub fn monic_in(f: &MultiPoly, var: &str) -> MultiPoly {
    let lc = f.lc_in(var);
    match lc.constant_value() {
        Some(c) if c != Rational::from_integer(0.into()) => f.scale(&(Rational::from_integer(1.into()) / c)),
        _ => f.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    fn p(s: &str) -> MultiPoly {
        parse_poly(s, &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn multivariate_gcd() {
        let a = p("x*y - z + 1");
        let b = p("x^2 + y*z");
        let c = p("x - 2*y*z");
        let g = gcd(&(&a * &b), &(&a * &c));
        assert_eq!(g, a.normalized());
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        assert_eq!(gcd(&p("x^2 + 1"), &p("x*y - 1")), MultiPoly::one(&["x", "y", "z"]));
    }

    #[test]
    fn gcd_picks_up_content() {
        let g = gcd(&p("(y+1)*(x^2+3)"), &p("(y+1)*(y-1)*x"));
        assert_eq!(g, p("y+1"));
    }

    #[test]
    fn yun_decomposition() {
        let f = p("(x-1)*(x+2)^2*(x^2+1)^3");
        let dec = yun(&f, "x");
        assert_eq!(dec.len(), 3);
        assert_eq!(dec[0], (p("x-1"), 1));
        assert_eq!(dec[1], (p("x+2"), 2));
        assert_eq!(dec[2], (p("x^2+1"), 3));
    }

    #[test]
    fn full_squarefree_part() {
        let f = p("(x*y-1)^2*(z+x)*(y^2+1)^3");
        assert_eq!(squarefree_part(&f), p("(x*y-1)*(z+x)*(y^2+1)").normalized());
    }
}
