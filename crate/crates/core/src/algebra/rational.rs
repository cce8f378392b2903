use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Nearest double, robust for numerators and denominators beyond f64 range.
pub fn rat_to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    // scale so the quotient is near 1, then reapply the binary exponent
    let (nn, dd) = if shift > 0 {
        (n.clone(), d << (shift as usize))
    } else {
        (n << ((-shift) as usize), d.clone())
    };
    let q = Rational::new(nn, dd).to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(shift.clamp(-2000, 2000) as i32)
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions with semiconvergent at the final step).
pub fn best_rational(x: f64, max_den: u64) -> Option<(i64, u64)> {
    if !x.is_finite() || max_den == 0 {
        return None;
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den as i128 {
            let k = (max_den as i128 - q0) / q1;
            let ps = k * p1 + p0;
            let qs = k * q1 + q0;
            let x = x.abs();
            if qs > 0 && (ps as f64 / qs as f64 - x).abs() < (p1 as f64 / q1 as f64 - x).abs() {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a as f64;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let p = if neg { -p1 } else { p1 };
    Some((i64::try_from(p).ok()?, u64::try_from(q1).ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::from(10).pow(400);
        let r = Rational::new(big.clone() * 3, big);
        assert!((rat_to_f64(&r) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn continued_fraction_recovers_small_rationals() {
        assert_eq!(best_rational(-2.0, 100), Some((-2, 1)));
        assert_eq!(best_rational(0.142857142857, 100), Some((1, 7)));
        assert_eq!(best_rational(std::f64::consts::PI, 1000), Some((355, 113)));
    }
}
