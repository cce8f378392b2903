//! The preset volume against an independent quadrature.

use knotchar::KnotPresentation;

/// `Cl₂(θ) = -∫₀^θ log|2 sin(t/2)| dt`, with the `log t` singularity
/// integrated in closed form and the smooth rest by Simpson.
fn clausen2(theta: f64) -> f64 {
    let smooth = |t: f64| if t == 0.0 { 0.0 } else { (2.0 * (t / 2.0).sin() / t).ln() };
    let n = 2000;
    let h = theta / n as f64;
    let mut acc = smooth(0.0) + smooth(theta);
    for k in 1..n {
        acc += smooth(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    -(theta * theta.ln() - theta) - acc * h / 3.0
}

#[test]
fn fig8_volume_two_ways() {
    use std::f64::consts::PI;
    let a = 2.0 * clausen2(PI / 3.0);
    let b = 3.0 * clausen2(2.0 * PI / 3.0);
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    let pres = KnotPresentation::builtin("fig8").unwrap();
    let vol = pres.vol_constant.unwrap();
    assert!((vol - a).abs() < 1e-12, "{vol} vs {a}");
    assert_eq!(pres.cs_constant, Some(0.0));
}
