//! Orthonormal-basis coefficients and kernel series for the Podles sphere.

use crate::error::{CsqError, Result};
use crate::numerics::{integrate_interval, AdaptiveOpts};
use num_complex::Complex64;

use super::dilog::dilog;

/// Precomputed data for the Podles kernel at a fixed hbar:
/// the coefficients c_n and the truncated series S(u) = sum c_n u^n.
#[derive(Debug, Clone)]
pub struct PodlesData {
    pub hbar: f64,
    pub coeffs: Vec<f64>,
    /// Radius of the chart disk the truncation was certified on.
    pub radius: f64,
    /// Bound on the omitted series mass, sup over |u| <= radius^2.
    pub truncation_bound: f64,
}

/// c_n = (2 pi int_0^inf t^n / sqrt(1+t) exp(Li2(-t)/hbar) dt)^{-1}.
///
/// The integral is evaluated in s = log t, where the integrand is a smooth
/// bump with log-Gaussian decay on both sides; relative error < 1e-10 is
/// requested from the adaptive rule, with certified window tails.
pub fn podles_coefficients(hbar: f64, n_max: usize) -> Result<Vec<f64>> {
    if hbar <= 0.0 {
        return Err(CsqError::Param(format!("podles hbar must be positive, got {hbar}")));
    }
    (0..=n_max).map(|n| podles_cn(hbar, n)).collect()
}

fn log_integrand(hbar: f64, n: usize, s: f64) -> f64 {
    // log of t^(n+1) / sqrt(1+t) * exp(Li2(-t)/hbar) at t = e^s
    // (the extra power of t is the Jacobian dt = t ds).
    let t = s.exp();
    (n as f64 + 1.0) * s - 0.5 * t.ln_1p() + dilog(-t) / hbar
}

fn podles_cn(hbar: f64, n: usize) -> Result<f64> {
    // Peak of the log-integrand is near s* = hbar (n + 1/2); widen until the
    // window edges are 50 e-folds below the peak.
    let mut s_peak = hbar * (n as f64 + 0.5);
    let mut phi_peak = log_integrand(hbar, n, s_peak);
    for _ in 0..200 {
        // crude ascent to the true maximum
        let h = 1e-3;
        let d = (log_integrand(hbar, n, s_peak + h) - log_integrand(hbar, n, s_peak - h)) / (2.0 * h);
        if d.abs() < 1e-9 {
            break;
        }
        s_peak += (d * hbar).clamp(-0.5, 0.5);
        phi_peak = log_integrand(hbar, n, s_peak);
    }
    let drop = 50.0;
    let mut lo = s_peak - 1.0;
    while phi_peak - log_integrand(hbar, n, lo) < drop {
        lo -= 1.0;
    }
    let mut hi = s_peak + 1.0;
    while phi_peak - log_integrand(hbar, n, hi) < drop {
        hi += 1.0;
    }
    let opts = AdaptiveOpts::with_tol(1e-12);
    let f = |s: f64| (log_integrand(hbar, n, s) - phi_peak).exp();
    let (val, err) = integrate_interval(&f, lo, hi, &opts)?;
    if !(val > 0.0) || err > 1e-10 * val {
        return Err(CsqError::QuadratureFailed {
            requested: 1e-10 * val,
            achieved: err,
            cells: 0,
            max_depth: opts.max_depth,
        });
    }
    let integral = val * phi_peak.exp();
    Ok(1.0 / (2.0 * std::f64::consts::PI * integral))
}

impl PodlesData {
    /// Build the kernel data, truncating the series adaptively: stop once the
    /// next term is below 1e-13 of the partial sum everywhere on the chart
    /// disk of the given radius. `terms` > 0 forces a fixed truncation order.
    pub fn build(hbar: f64, terms: usize, radius: f64) -> Result<Self> {
        let u_max = radius * radius;
        let mut coeffs: Vec<f64> = Vec::new();
        let mut partial_at_edge = 0.0f64;
        let mut n = 0usize;
        loop {
            let c = podles_cn(hbar, n)?;
            let term = c * u_max.powi(n as i32);
            if terms == 0 {
                coeffs.push(c);
                partial_at_edge += term;
                if n >= 4 && term < 1e-13 * partial_at_edge {
                    break;
                }
                if n > 400 {
                    return Err(CsqError::Param(format!(
                        "podles truncation did not settle within 400 terms (hbar={hbar}, radius={radius})"
                    )));
                }
            } else {
                coeffs.push(c);
                partial_at_edge += term;
                if n + 1 >= terms {
                    break;
                }
            }
            n += 1;
        }
        // Terms decay super-geometrically; bound the omitted mass by a
        // geometric series with the last observed ratio.
        let m = coeffs.len();
        let last = coeffs[m - 1] * u_max.powi((m - 1) as i32);
        let prev = coeffs[m - 2] * u_max.powi((m - 2) as i32);
        let ratio = (last / prev).min(0.9);
        let truncation_bound = last * ratio / (1.0 - ratio);
        if terms > 0 && truncation_bound > 1e-6 * partial_at_edge {
            return Err(CsqError::Param(format!(
                "podles truncation at {terms} terms too small for radius {radius} (bound {truncation_bound:e})"
            )));
        }
        Ok(PodlesData { hbar, coeffs, radius, truncation_bound })
    }

    /// S(u) = sum_n c_n u^n for complex u.
    pub fn kernel_series(&self, u: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for &c in &self.coeffs {
            acc += c * p;
            p *= u;
        }
        acc
    }

    /// S(t) for real nonnegative t (all terms positive: no cancellation).
    pub fn kernel_series_real(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut p = 1.0;
        for &c in &self.coeffs {
            acc += c * p;
            p *= t;
        }
        acc
    }

    /// S(u) * exp(log_scale), each term exponentiated separately so the
    /// product stays finite even where S alone would overflow.
    pub fn kernel_series_scaled(&self, u: Complex64, log_scale: f64) -> Complex64 {
        let r = u.norm();
        if r == 0.0 {
            return Complex64::new(self.coeffs[0] * log_scale.exp(), 0.0);
        }
        let lr = r.ln();
        let phi = u.arg();
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, &c) in self.coeffs.iter().enumerate() {
            let mag = (c.ln() + n as f64 * lr + log_scale).exp();
            acc += Complex64::from_polar(mag, n as f64 * phi);
        }
        acc
    }

    /// Upper limit (in s = ln r) for kernel-weighted chart integrals: beyond
    /// it the certified bound of [`Self::integrand_tail_bound`] applies.
    pub fn integration_s_hi(&self) -> f64 {
        0.5 * self.tail_s0()
    }

    fn tail_s0(&self) -> f64 {
        let deg = (self.coeffs.len() - 1) as f64;
        self.hbar * (deg + 1.5) + 2.0 * self.radius.ln().max(0.0) + 4.0
    }

    /// Certified bound on int_{t > t0} |S(x-bar z)|^2 w(t) dt / S(|x|^2) for
    /// |x| <= radius, where w is the orthogonality weight. Uses the inversion
    /// bound Li2(-t) <= -ln(t)^2/2 - pi^2/12 (t >= 1), the Cauchy–Schwarz
    /// bound |S(u)|^2 <= (N+1) sum c_n^2 |u|^(2n), and a first-derivative
    /// envelope bound on each log-concave term.
    pub fn integrand_tail_bound(&self) -> f64 {
        let s0 = self.tail_s0();
        let n_terms = self.coeffs.len();
        let deg = (n_terms - 1) as f64;
        let c0 = self.coeffs[0];
        let mut logs: Vec<f64> = Vec::with_capacity(n_terms);
        for (n, &c) in self.coeffs.iter().enumerate() {
            let nf = n as f64;
            let phi = (nf + 0.5) * s0 - s0 * s0 / (2.0 * self.hbar);
            let dphi = (nf + 0.5) - s0 / self.hbar;
            debug_assert!(dphi < -1.0);
            let l = (deg + 1.0).ln()
                + 2.0 * c.ln()
                + 2.0 * nf * self.radius.ln()
                + std::f64::consts::LN_2
                - std::f64::consts::PI * std::f64::consts::PI / (12.0 * self.hbar)
                + phi
                - (-dphi).ln()
                - c0.ln();
            logs.push(l);
        }
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return 0.0;
        }
        let sum: f64 = logs.iter().map(|l| (l - m).exp()).sum();
        (m + sum.ln()).exp()
    }
}
