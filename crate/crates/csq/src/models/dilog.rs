//! Real dilogarithm on (-inf, 1].

use std::f64::consts::PI;

/// Li2(x) = -int_0^x log(1-t)/t dt for x <= 1.
///
/// Series on |x| <= 1/2, Landen's identity on (-1, -1/2), inversion on
/// (-inf, -1]. Accurate to ~1e-15.
pub fn dilog(x: f64) -> f64 {
    assert!(x <= 1.0, "dilog implemented for x <= 1, got {x}");
    if x == 1.0 {
        return PI * PI / 6.0;
    }
    if x < -1.0 {
        // Li2(x) + Li2(1/x) = -pi^2/6 - ln^2(-x)/2 for x < 0.
        let l = (-x).ln();
        return -PI * PI / 6.0 - 0.5 * l * l - dilog(1.0 / x);
    }
    if x < -0.5 {
        // Landen: Li2(x) = -Li2(x/(x-1)) - ln^2(1-x)/2, maps (-1,0) into (0,1/2).
        let y = x / (x - 1.0);
        let l = (1.0 - x).ln();
        return -dilog_series(y) - 0.5 * l * l;
    }
    if x > 0.5 {
        // Li2(x) + Li2(1-x) = pi^2/6 - ln(x)ln(1-x).
        return PI * PI / 6.0 - x.ln() * (1.0 - x).ln() - dilog_series(1.0 - x);
    }
    dilog_series(x)
}

fn dilog_series(x: f64) -> f64 {
    debug_assert!(x.abs() <= 0.5 + 1e-15);
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0f64;
    while term.abs() > 1e-18 * sum.abs().max(1.0) && k < 200.0 {
        term *= x;
        k += 1.0;
        sum += term / (k * k);
    }
    sum
}
