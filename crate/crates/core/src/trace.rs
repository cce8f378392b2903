//! Trace polynomials of words in a rank-two free group.
//!
//! Every word `w(a, b)` has a unique polynomial `P_w(x, y, z)` with
//! `tr w(A, B) = P_w(tr A, tr B, tr AB)` for all `A, B ∈ SL₂(ℂ)`. It is
//! computed by rewriting with `tr(XY) + tr(XY⁻¹) = tr X tr Y`, invariance
//! under cyclic rotation and inversion, and the power recursion
//! `tr(g^e) = tr(g^(e-1)) tr g - tr(g^(e-2))`.

use std::collections::{HashMap, HashSet};
use std::sync::RwLock;

use crate::algebra::MultiPoly;
use crate::error::{Error, Result};
use crate::word::GroupWord;

pub const TRACE_VARS: [&str; 3] = ["x", "y", "z"];
pub const PERIPHERAL_VARS: [&str; 3] = ["u", "v", "w"];

/// Recursion depth at which rewriting is abandoned.
pub const MAX_DEPTH: usize = 10_000;

/// `S_n(t)` with `S_0 = 2`, `S_1 = t`, `S_n = t S_(n-1) - S_(n-2)`, so that
/// `tr(g^n) = S_n(tr g)`. Symmetric in the sign of `n`.
pub fn chebyshev_trace(n: i32, t: &MultiPoly) -> MultiPoly {
    let n = n.unsigned_abs();
    let mut prev = MultiPoly::from_int(t.vars(), 2);
    if n == 0 {
        return prev;
    }
    let mut cur = t.clone();
    for _ in 1..n {
        let next = &(t * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Memoizing trace engine; safe to share across threads.
#[derive(Default)]
pub struct TraceEngine {
    memo: RwLock<HashMap<GroupWord, MultiPoly>>,
}

impl TraceEngine {
    pub fn new() -> Self {
        TraceEngine::default()
    }

    pub fn cache_size(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    /// Trace polynomial of `w` in `(x, y, z) = (tr a, tr b, tr ab)`.
    pub fn trace_poly(&self, w: &GroupWord) -> Result<MultiPoly> {
        let mut active = HashSet::new();
        self.trace_rec(w, 0, &mut active)
    }

    fn trace_rec(
        &self,
        w: &GroupWord,
        depth: usize,
        active: &mut HashSet<GroupWord>,
    ) -> Result<MultiPoly> {
        if depth > MAX_DEPTH {
            return Err(Error::DepthExceeded(MAX_DEPTH));
        }
        let key = w.canonical_cyclic();
        if let Some(p) = self.memo.read().unwrap().get(&key) {
            return Ok(p.clone());
        }
        if !active.insert(key.clone()) {
            return Err(Error::DepthExceeded(depth));
        }
        let result = self.expand(&key, depth, active);
        active.remove(&key);
        let p = result?;
        self.memo.write().unwrap().insert(key, p.clone());
        Ok(p)
    }

    fn expand(
        &self,
        w: &GroupWord,
        depth: usize,
        active: &mut HashSet<GroupWord>,
    ) -> Result<MultiPoly> {
        let s = w.syllables();
        let gen_var = |g: u8| MultiPoly::var(&TRACE_VARS, if g == 0 { "x" } else { "y" });
        match s.len() {
            0 => return Ok(MultiPoly::from_int(&TRACE_VARS, 2)),
            1 => return Ok(chebyshev_trace(s[0].1, &gen_var(s[0].0))),
            _ => {}
        }
        // Rotate the chosen syllable to the end: w = U g^e.
        let split = |i: usize| -> (Vec<(u8, i32)>, (u8, i32)) {
            let rot: Vec<(u8, i32)> = s[i + 1..].iter().chain(&s[..=i]).cloned().collect();
            let (last, u) = rot.split_last().unwrap();
            (u.to_vec(), *last)
        };
        let with_last = |u: &[(u8, i32)], g: u8, e: i32| {
            GroupWord::from_syllables(u.iter().cloned().chain([(g, e)]))
        };
        if let Some(i) = s.iter().position(|&(_, e)| e < 0) {
            // tr(U g^e) = tr(U g^(e+1)) tr g - tr(U g^(e+2))
            let (u, (g, e)) = split(i);
            let t1 = self.trace_rec(&with_last(&u, g, e + 1), depth + 1, active)?;
            let t2 = self.trace_rec(&with_last(&u, g, e + 2), depth + 1, active)?;
            return Ok(&(&t1 * &gen_var(g)) - &t2);
        }
        if let Some(i) = s.iter().position(|&(_, e)| e >= 2) {
            // tr(U g^e) = tr(U g^(e-1)) tr g - tr(U g^(e-2))
            let (u, (g, e)) = split(i);
            let t1 = self.trace_rec(&with_last(&u, g, e - 1), depth + 1, active)?;
            let t2 = self.trace_rec(&with_last(&u, g, e - 2), depth + 1, active)?;
            return Ok(&(&t1 * &gen_var(g)) - &t2);
        }
        // all exponents are 1 and generators alternate: w = (ab)^k
        let k = (s.len() / 2) as i32;
        Ok(chebyshev_trace(k, &MultiPoly::var(&TRACE_VARS, "z")))
    }
}

/// Trace polynomial with a fresh engine.
pub fn trace_poly(w: &GroupWord) -> Result<MultiPoly> {
    TraceEngine::new().trace_poly(w)
}

/// Applies a substitution to a trace polynomial.
pub fn specialize(p: &MultiPoly, bindings: &HashMap<String, MultiPoly>) -> MultiPoly {
    p.substitute(bindings)
}

/// The knot-group identification `y = x` (conjugate generators), giving a
/// polynomial in `(x, z)`.
pub fn specialize_conjugate(p: &MultiPoly) -> MultiPoly {
    let x = MultiPoly::var(&["x"], "x");
    p.substitute_one("y", &x)
        .with_vars(&["x", "z"])
        .expect("trace polynomial lives in x, y, z")
}

/// Like [`specialize`], but fails if any variable is left unbound.
pub fn specialize_ground(
    p: &MultiPoly,
    bindings: &HashMap<String, MultiPoly>,
) -> Result<MultiPoly> {
    for v in p.used_vars() {
        if !bindings.contains_key(&v) {
            return Err(Error::Input(format!("variable {v} left unbound")));
        }
    }
    Ok(p.substitute(bindings))
}

/// `tr(μ^p λ^q)` for commuting `μ, λ` as a polynomial in
/// `u = tr μ`, `v = tr λ`, `w = tr μλ`.
pub fn peripheral_trace(p: i32, q: i32) -> Result<MultiPoly> {
    if p == 0 && q == 0 {
        return Err(Error::Input("trivial peripheral class".into()));
    }
    let (p, q) = if p < 0 { (-p, -q) } else { (p, q) };
    let vars = PERIPHERAL_VARS;
    let u = MultiPoly::var(&vars, "u");
    let v = MultiPoly::var(&vars, "v");
    let w = MultiPoly::var(&vars, "w");
    if p == 0 {
        return Ok(chebyshev_trace(q, &v));
    }
    // T(1, q): T(1,1) = w, T(1,0) = u, T(1,-1) = uv - w, and
    // T(1, q+1) = v T(1, q) - T(1, q-1) in either direction.
    let t1 = |q: i32| -> MultiPoly {
        if q == 0 {
            return u.clone();
        }
        let mut prev = u.clone();
        let mut cur = if q > 0 { w.clone() } else { &(&u * &v) - &w };
        for _ in 1..q.abs() {
            let next = &(&v * &cur) - &prev;
            prev = cur;
            cur = next;
        }
        cur
    };
    // T(p, q) = u T(p-1, q) - T(p-2, q)
    let mut prev = if q == 0 {
        MultiPoly::from_int(&vars, 2)
    } else {
        chebyshev_trace(q, &v)
    };
    let mut cur = t1(q);
    for _ in 1..p {
        let next = &(&u * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn tp(w: &str) -> MultiPoly {
        trace_poly(&GroupWord::parse(w).unwrap()).unwrap()
    }

    fn xyz(s: &str) -> MultiPoly {
        parse_poly(s, &TRACE_VARS).unwrap()
    }

    #[test]
    fn basic_identities() {
        assert_eq!(tp(""), xyz("2"));
        assert_eq!(tp("aa"), xyz("x^2 - 2"));
        assert_eq!(tp("aB"), xyz("x*y - z"));
        assert_eq!(tp("abAB"), xyz("x^2 + y^2 + z^2 - x*y*z - 2"));
    }

    #[test]
    fn conjugate_specializations() {
        let s = |w: &str| specialize_conjugate(&tp(w));
        let xz = |e: &str| parse_poly(e, &["x", "z"]).unwrap();
        assert_eq!(s("aB"), xz("x^2 - z"));
        assert_eq!(s("BabA"), xz("z^2 - x^2*z + 2*x^2 - 2"));
        assert_eq!(s("aab"), xz("x*z - x"));
    }

    #[test]
    fn peripheral_examples() {
        let uvw = |e: &str| parse_poly(e, &PERIPHERAL_VARS).unwrap();
        assert_eq!(peripheral_trace(1, 1).unwrap(), uvw("w"));
        assert_eq!(peripheral_trace(2, 1).unwrap(), uvw("u*w - v"));
        assert_eq!(peripheral_trace(3, 1).unwrap(), uvw("(u^2-1)*w - u*v"));
        assert_eq!(peripheral_trace(1, 0).unwrap(), uvw("u"));
        assert!(peripheral_trace(0, 0).is_err());
    }

    #[test]
    fn peripheral_matches_word_traces() {
        for p in -4..=4 {
            for q in -4..=4 {
                if p == 0 && q == 0 {
                    continue;
                }
                let w = GroupWord::generator(0)
                    .pow(p)
                    .concat(&GroupWord::generator(1).pow(q));
                let t = trace_poly(&w).unwrap();
                let renamed = t.rename("x", "u").rename("y", "v").rename("z", "w");
                assert_eq!(renamed, peripheral_trace(p, q).unwrap(), "p={p} q={q}");
            }
        }
    }
}
