//! Finite-difference stencils.

use num_complex::Complex64;

use crate::error::Result;

/// Central-difference estimate of the mixed second derivative
/// d/ds d/dt g(s u, t v) at (0, 0), with O(h^2) error.
///
/// `g` receives the scalar offsets (s, t) along the two directions and may
/// reject points outside its chart; the error is propagated with the
/// offending offsets attached.
pub fn mixed_second_difference<F>(g: F, h: f64) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Result<Complex64>,
{
    assert!(h > 0.0);
    let pp = g(h, h)?;
    let pm = g(h, -h)?;
    let mp = g(-h, h)?;
    let mm = g(-h, -h)?;
    Ok((pp - pm - mp + mm) / Complex64::new(4.0 * h * h, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(v: f64) -> Result<Complex64> {
        Ok(Complex64::new(v, 0.0))
    }

    #[test]
    fn bilinear_pairing() {
        // g(s, t) = (s e1) . (t e2) paired coordinatewise as s*t.
        let got = mixed_second_difference(|s, t| ok(s * t), 1e-3).unwrap();
        assert!((got.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_gives_zero() {
        let got = mixed_second_difference(|_, _| ok(7.5), 1e-3).unwrap();
        assert!(got.norm() < 1e-12);
    }

    #[test]
    fn sin_sin_with_second_order_decay() {
        // Oracle: d_s d_t sin(s) sin(t) at 0 is cos(0)cos(0) = 1.
        let f = |s: f64, t: f64| ok(s.sin() * t.sin());
        let e1 = (mixed_second_difference(f, 1e-2).unwrap().re - 1.0).abs();
        let e2 = (mixed_second_difference(f, 5e-3).unwrap().re - 1.0).abs();
        assert!((mixed_second_difference(f, 1e-4).unwrap().re - 1.0).abs() < 1e-8);
        let ratio = e1 / e2;
        assert!((3.0..5.0).contains(&ratio), "expected ~4x error drop, got {ratio}");
    }

    #[test]
    fn stencil_error_propagates() {
        let g = |s: f64, t: f64| {
            if s + t > 1.5e-3 {
                Err(crate::error::CsqError::ChartViolation {
                    x: s,
                    y: t,
                    reason: "outside".into(),
                })
            } else {
                ok(s * t)
            }
        };
        assert!(mixed_second_difference(g, 1e-3).is_err());
    }
}
