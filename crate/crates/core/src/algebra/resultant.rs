use super::divide::divide_in;
use super::poly::MultiPoly;
use crate::error::AlgebraError;

/// Sylvester matrix of `f` and `g` in `var` (rows of `f` first, highest
/// coefficient leftmost).
pub fn sylvester_matrix(f: &MultiPoly, g: &MultiPoly, var: &str) -> Vec<Vec<MultiPoly>> {
    let (f, g) = MultiPoly::unify(f, g);
    let fc = f.coeffs_in(var);
    let gc = g.coeffs_in(var);
    let n = fc.len() - 1;
    let m = gc.len() - 1;
    let size = n + m;
    let zero = MultiPoly::zero(f.vars());
    let mut rows = Vec::with_capacity(size);
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in fc.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in gc.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Determinant by Bareiss fraction-free elimination; every intermediate
/// division is exact.
pub fn bareiss_det(mut m: Vec<Vec<MultiPoly>>, vars: &[String]) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one(vars);
    }
    let mut sign_flip = false;
    let mut prev = MultiPoly::one(vars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return MultiPoly::zero(vars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = if num.is_zero() {
                    num
                } else {
                    num.exact_div(&prev).expect("Bareiss division is exact")
                };
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign_flip {
        -d
    } else {
        d
    }
}

/// Resultant in `var` computed straight from the Sylvester determinant.
pub fn resultant_sylvester(f: &MultiPoly, g: &MultiPoly, var: &str) -> MultiPoly {
    let (f, g) = MultiPoly::unify(f, g);
    if f.is_zero() || g.is_zero() {
        return MultiPoly::zero(f.vars());
    }
    let mut vars = f.vars().to_vec();
    if !vars.iter().any(|v| v == var) {
        vars.push(var.to_string());
    }
    let f = f.with_vars(&vars).unwrap();
    let g = g.with_vars(&vars).unwrap();
    let det = bareiss_det(sylvester_matrix(&f, &g, var), &vars);
    drop_var(&det, var)
}

fn drop_var(p: &MultiPoly, var: &str) -> MultiPoly {
    let keep: Vec<String> = p.vars().iter().filter(|v| *v != var).cloned().collect();
    p.with_vars(&keep).expect("result is free of the eliminated variable")
}

/// Resultant of `f` and `g` with respect to `var`, with the Sylvester
/// convention `Res(f, g) = lc(f)^deg g · ∏ g(α)` over the roots α of `f`.
///
/// When either argument has a constant leading coefficient in `var`, the
/// other is first reduced modulo it, which shrinks the determinant.
pub fn resultant(f: &MultiPoly, g: &MultiPoly, var: &str) -> Result<MultiPoly, AlgebraError> {
    let (f, g) = MultiPoly::unify(f, g);
    if f.is_zero() || g.is_zero() {
        return Ok(drop_var(&MultiPoly::zero(f.vars()), var));
    }
    let n = f.degree_in(var).unwrap();
    let m = g.degree_in(var).unwrap();
    if n == 0 {
        return Ok(drop_var(&f.pow(m), var));
    }
    if m == 0 {
        return Ok(drop_var(&g.pow(n), var));
    }
    if f.lc_in(var).constant_value().is_some() {
        return norm_resultant(&f, &g, var);
    }
    if g.lc_in(var).constant_value().is_some() {
        // Res(f, g) = (-1)^(nm) Res(g, f)
        let r = norm_resultant(&g, &f, var)?;
        return Ok(if (n * m) % 2 == 1 { -r } else { r });
    }
    Ok(resultant_sylvester(&f, &g, var))
}

/// `lc(f)^deg g · det(h ↦ g h mod f)` for `f` with constant leading
/// coefficient: the multiplication map on `R[var]/(f)` has determinant
/// `∏ g(α)`.
fn norm_resultant(f: &MultiPoly, g: &MultiPoly, var: &str) -> Result<MultiPoly, AlgebraError> {
    let n = f.degree_in(var).unwrap() as usize;
    let m = g.degree_in(var).unwrap();
    let lc = f.lc_in(var).constant_value().expect("constant leading coefficient");
    let x = MultiPoly::var(f.vars(), var);
    let mut col = divide_in(g, f, var, false)?.remainder;
    let mut cols = Vec::with_capacity(n);
    for _ in 0..n {
        let mut c = col.coeffs_in(var);
        c.resize(n, MultiPoly::zero(f.vars()));
        cols.push(c);
        col = divide_in(&(&col * &x), f, var, false)?.remainder;
    }
    // the matrix is stored by columns; the determinant is unchanged
    let det = small_det(cols, f.vars());
    // det is ∏ g(α) for monic f; rescale for the leading coefficient
    let scale = num_traits::pow(lc, m as usize);
    Ok(drop_var(&det.scale(&scale), var))
}

/// Laplace expansion for tiny matrices, Bareiss otherwise.
fn small_det(m: Vec<Vec<MultiPoly>>, vars: &[String]) -> MultiPoly {
    match m.len() {
        0 => MultiPoly::one(vars),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        3 => {
            let minor = |a: usize, b: usize, c: usize, d: usize| {
                &(&m[1][a] * &m[2][b]) - &(&m[1][c] * &m[2][d])
            };
            let t0 = &m[0][0] * &minor(1, 2, 2, 1);
            let t1 = &m[0][1] * &minor(0, 2, 2, 0);
            let t2 = &m[0][2] * &minor(0, 1, 1, 0);
            &(&t0 - &t1) + &t2
        }
        _ => bareiss_det(m, vars),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_poly;

    #[test]
    fn resultant_of_linear_factors() {
        let vars = ["x"];
        let f = parse_poly("(x-1)*(x-2)", &vars).unwrap();
        let g = parse_poly("x-3", &vars).unwrap();
        // ∏ (α - 3) = (1-3)(2-3) = 2
        let r = resultant(&f, &g, "x").unwrap();
        assert_eq!(r.constant_value().unwrap(), crate::algebra::rational::int(2));
    }

    #[test]
    fn shortcut_matches_sylvester() {
        let vars = ["x", "z"];
        let c = parse_poly("z^2 - (x^2+1)*z + 2*x^2 - 1", &vars).unwrap();
        let h = parse_poly("3*x*z^4 - z^3 + x^2*z - 5", &vars).unwrap();
        assert_eq!(
            resultant(&c, &h, "z").unwrap(),
            resultant_sylvester(&c, &h, "z")
        );
        assert_eq!(
            resultant(&h, &c, "z").unwrap(),
            resultant_sylvester(&h, &c, "z")
        );
    }

    #[test]
    fn norm_path_matches_sylvester_with_scaled_leading_coefficient() {
        let vars = ["x", "z"];
        let c = parse_poly("3*z^3 - x*z + 2", &vars).unwrap();
        let h = parse_poly("(x+1)*z^2 + x^3*z - 7", &vars).unwrap();
        assert_eq!(resultant(&c, &h, "z").unwrap(), resultant_sylvester(&c, &h, "z"));
        assert_eq!(resultant(&h, &c, "z").unwrap(), resultant_sylvester(&h, &c, "z"));
        let q = parse_poly("2*z^5 - z + x", &vars).unwrap();
        assert_eq!(resultant(&q, &h, "z").unwrap(), resultant_sylvester(&q, &h, "z"));
    }

    #[test]
    fn eliminating_a_parameter() {
        let vars = ["x", "t"];
        let f = parse_poly("t^2 - 3*t + 1", &vars).unwrap();
        let g = parse_poly("t*x^2 - (t+1)^2", &vars).unwrap();
        let r = resultant(&f, &g, "t").unwrap().normalized();
        // t + 1/t = 3, x^2 = t + 2 + 1/t = 5
        assert_eq!(r, parse_poly("(x^2-5)^2", &["x"]).unwrap());
    }
}
