//! Gauss–Legendre rules on reference cells.

/// Nodes and weights of the m-point Gauss–Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre polynomial; accurate to
/// machine precision for the small m used here.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
        let (_, d) = legendre_and_deriv(m, 0.0);
        weights[m / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_and_deriv(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    if m == 1 {
        return (x, 1.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A tensor-product quadrature rule on the reference square [-1,1] x [-1,1].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Node coordinates in the reference square.
    pub nodes: Vec<[f64; 2]>,
    /// Positive weights; they sum to the reference-square area 4.
    pub weights: Vec<f64>,
    /// Polynomial exactness degree per axis (2m - 1 for an m-point rule).
    pub order: usize,
}

impl QuadratureRule {
    /// Tensor-product Gauss–Legendre rule with m points per axis.
    pub fn gauss_legendre_2d(m: usize) -> Self {
        let (x, w) = gauss_legendre(m);
        let mut nodes = Vec::with_capacity(m * m);
        let mut weights = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                nodes.push([x[i], x[j]]);
                weights.push(w[i] * w[j]);
            }
        }
        QuadratureRule {
            nodes,
            weights,
            order: 2 * m - 1,
        }
    }

    /// The default cell rule used by the adaptive integrator.
    pub fn default_rule() -> Self {
        Self::gauss_legendre_2d(8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_weights_basic() {
        for m in 1..=16 {
            let (x, w) = gauss_legendre(m);
            let sum: f64 = w.iter().sum();
            assert!((sum - 2.0).abs() < 1e-13, "weight sum m={m}: {sum}");
            assert!(w.iter().all(|&wi| wi > 0.0));
            for i in 1..m {
                assert!(x[i] > x[i - 1]);
            }
        }
    }

    #[test]
    fn polynomial_exactness() {
        // m-point rule integrates x^(2m-1) exactly.
        let m = 8;
        let (x, w) = gauss_legendre(m);
        for deg in 0..(2 * m) {
            let got: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(deg as i32)).sum();
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((got - exact).abs() < 1e-13, "deg {deg}: {got} vs {exact}");
        }
    }

    #[test]
    fn rule_weight_sum_is_reference_area() {
        let rule = QuadratureRule::default_rule();
        let sum: f64 = rule.weights.iter().sum();
        assert!((sum - 4.0).abs() < 1e-12);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
    }
}
