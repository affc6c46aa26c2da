//! Finite-dimensional coherent-state quantization on the sphere: basis
//! sections, coherent projections, Toeplitz operators, covariant symbols,
//! the Berezin-transform limit and round-trip propagator reconstruction.

pub mod dense;
pub mod su2;

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CsqError, Result};
use crate::models::{spinor, ChartPoint, ModelKind, ModelSpace};
use crate::models::{spinor_phith, xyz_uth};
use crate::numerics::{integrate_rect_vec, AdaptiveOpts};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn binomial(n: u32, k: u32) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// One orthonormal holomorphic basis section Psi_k(z) = coeff * z^k.
#[derive(Debug, Clone, Copy)]
pub struct BasisSection {
    pub n: u32,
    pub k: u32,
    pub coefficient: f64,
}

impl BasisSection {
    pub fn new(n: u32, k: u32) -> Self {
        assert!(k <= n && n >= 1);
        let coefficient = ((n as f64 + 1.0) / (TWO_PI * n as f64) * binomial(n, k)).sqrt();
        BasisSection { n, k, coefficient }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficient * crate::models::cpow(z, self.k)
    }
}

/// A dense operator on the level-n Hilbert space C^{n+1}, in the Psi basis.
#[derive(Debug, Clone)]
pub struct QuantOperator {
    pub dim: usize,
    pub mat: Array2<Complex64>,
    pub label: String,
}

impl QuantOperator {
    pub fn new(mat: Array2<Complex64>, label: impl Into<String>) -> Self {
        let dim = mat.nrows();
        assert_eq!(dim, mat.ncols());
        QuantOperator { dim, mat, label: label.into() }
    }

    pub fn identity(dim: usize, label: impl Into<String>) -> Self {
        Self::new(dense::identity(dim), label)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        dense::max_abs_diff(&self.mat, &dense::dagger(&self.mat)) < tol
    }

    pub fn trace(&self) -> Complex64 {
        dense::trace(&self.mat)
    }

    /// JSON export: dimension plus row-major entries as [re, im] pairs.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<[f64; 2]> = self.mat.iter().map(|v| [v.re, v.im]).collect();
        serde_json::json!({ "dim": self.dim, "label": self.label, "entries": entries })
    }
}

/// Normalized coherent vector at a chart point: v_k proportional to
/// sqrt(C(n,k)) conj(z)^k / (1+|z|^2)^{n/2}, evaluated through the spinor.
pub fn coherent_vector(n: u32, p: ChartPoint) -> Vec<Complex64> {
    let xi = spinor(p);
    coherent_vector_from_spinor(n, xi)
}

pub(crate) fn coherent_vector_from_spinor(n: u32, xi: [Complex64; 2]) -> Vec<Complex64> {
    (0..=n)
        .map(|k| {
            binomial(n, k).sqrt()
                * crate::models::cpow(xi[0], n - k)
                * crate::models::cpow(xi[1], k)
        })
        .collect()
}

fn level_of(m: &ModelSpace) -> Result<u32> {
    match m.kind() {
        ModelKind::Sphere { n } => Ok(*n),
        _ => Err(CsqError::Param("operation requires the sphere model".into())),
    }
}

/// q_x = v v*: the rank-one orthogonal projection onto the coherent state.
pub fn coherent_projection(m: &ModelSpace, x: ChartPoint) -> Result<QuantOperator> {
    let n = level_of(m)?;
    let v = coherent_vector(n, x);
    let dim = v.len();
    let mat = Array2::from_shape_fn((dim, dim), |(j, k)| v[j] * v[k].conj());
    Ok(QuantOperator::new(mat, format!("q({}, {})", x.z.re, x.z.im)))
}

/// Gram matrix of the basis sections against the level-n weighted measure,
/// computed from the chart formulas (not from coherent projections).
pub fn gram_matrix(m: &ModelSpace, tol: f64) -> Result<Array2<Complex64>> {
    let n = level_of(m)?;
    let cal = m.calibration();
    let dim = (n + 1) as usize;
    let sections: Vec<BasisSection> = (0..=n).map(|k| BasisSection::new(n, k)).collect();
    // conj(Psi_j) Psi_k h nu in (phi, theta): the radial factor is
    // sin^{j+k+1} cos^{2n+1-j-k}, a trig polynomial.
    let f = |phi: f64, th: f64, out: &mut [Complex64]| {
        let (sp, cp) = (phi.sin(), phi.cos());
        for j in 0..dim {
            for k in 0..dim {
                let radial = sp.powi((j + k + 1) as i32) * cp.powi((2 * n as usize + 1 - j - k) as i32);
                let ang = Complex64::from_polar(1.0, (k as f64 - j as f64) * th);
                out[j * dim + k] = sections[j].coefficient
                    * sections[k].coefficient
                    * 2.0
                    * n as f64
                    * cal
                    * radial
                    * ang;
            }
        }
    };
    let r = integrate_rect_vec(
        &f,
        dim * dim,
        [[0.0, std::f64::consts::FRAC_PI_2], [0.0, TWO_PI]],
        &AdaptiveOpts::with_tol(tol),
    )?;
    Ok(Array2::from_shape_vec((dim, dim), r.values).unwrap())
}

/// int q_x dmu(x) as a matrix, with the max deviation from the identity and
/// its trace.
pub fn resolution_of_identity(m: &ModelSpace, tol: f64) -> Result<(f64, f64)> {
    let q = integral_of_projections(m, None, tol)?;
    let dim = q.nrows();
    let residual = dense::max_abs_diff(&q, &dense::identity(dim));
    Ok((residual, dense::trace(&q).re))
}

fn integral_of_projections(
    m: &ModelSpace,
    weight: Option<&(dyn Fn([f64; 3]) -> Complex64 + Sync)>,
    tol: f64,
) -> Result<Array2<Complex64>> {
    let n = level_of(m)?;
    let cal = m.calibration();
    let dim = (n + 1) as usize;
    let density = cal * (n as f64 + 1.0) / TWO_PI;
    let f = |phi: f64, th: f64, out: &mut [Complex64]| {
        let v = coherent_vector_from_spinor(n, spinor_phith(phi, th));
        let u = phi.sin().powi(2);
        let scale = match weight {
            Some(w) => w(xyz_uth(u, th)),
            None => Complex64::new(1.0, 0.0),
        } * density
            * (2.0 * phi).sin();
        for j in 0..dim {
            for k in 0..dim {
                out[j * dim + k] = scale * v[j] * v[k].conj();
            }
        }
    };
    let r = integrate_rect_vec(
        &f,
        dim * dim,
        [[0.0, std::f64::consts::FRAC_PI_2], [0.0, TWO_PI]],
        &AdaptiveOpts::with_tol(tol),
    )?;
    Ok(Array2::from_shape_vec((dim, dim), r.values).unwrap())
}

/// Q_f = int f(x) q_x dmu(x), with f given on the embedded sphere.
pub fn build_q(
    m: &ModelSpace,
    f: &(dyn Fn([f64; 3]) -> Complex64 + Sync),
    tol: f64,
) -> Result<QuantOperator> {
    let mat = integral_of_projections(m, Some(f), tol)?;
    Ok(QuantOperator::new(mat, "Q_f"))
}

/// The covariant symbol x -> rho_x(A) = <v_x, A v_x>.
#[derive(Debug, Clone)]
pub struct CovariantSymbol {
    pub n: u32,
    pub mat: Array2<Complex64>,
}

pub fn covariant_symbol(m: &ModelSpace, a: &QuantOperator) -> Result<CovariantSymbol> {
    let n = level_of(m)?;
    assert_eq!(a.dim, (n + 1) as usize);
    Ok(CovariantSymbol { n, mat: a.mat.clone() })
}

impl CovariantSymbol {
    pub fn eval(&self, p: ChartPoint) -> Complex64 {
        self.eval_spinor(spinor(p))
    }

    pub fn eval_xyz(&self, v: [f64; 3]) -> Complex64 {
        self.eval_spinor(crate::models::spinor_from_xyz(v))
    }

    fn eval_spinor(&self, xi: [Complex64; 2]) -> Complex64 {
        let v = coherent_vector_from_spinor(self.n, xi);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..v.len() {
            for k in 0..v.len() {
                acc += v[j].conj() * self.mat[(j, k)] * v[k];
            }
        }
        acc
    }
}

/// Integral kernel of an operator: K_A(x, y) = v(y)* A v(x), normalized so
/// that the identity has kernel W(x, y).
pub fn operator_kernel(n: u32, a: &Array2<Complex64>, x: ChartPoint, y: ChartPoint) -> Complex64 {
    let vx = coherent_vector(n, x);
    let vy = coherent_vector(n, y);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..vx.len() {
        for k in 0..vx.len() {
            acc += vy[j].conj() * a[(j, k)] * vx[k];
        }
    }
    acc
}

/// Berezin transform error table: for each level n, the sup over sample
/// points of |rho_x(Q_f) - f(x)|.
pub fn berezin_transform_limit(
    f: &(dyn Fn([f64; 3]) -> f64 + Sync),
    levels: &[u32],
    sample_points: &[[f64; 3]],
    tol: f64,
) -> Result<Vec<(u32, f64)>> {
    let mut table = Vec::with_capacity(levels.len());
    for &n in levels {
        let m = ModelSpace::sphere(n)?;
        let fc = |v: [f64; 3]| Complex64::new(f(v), 0.0);
        let qf = build_q(&m, &fc, tol)?;
        let sym = covariant_symbol(&m, &qf)?;
        let e = sample_points
            .iter()
            .map(|&p| (sym.eval_xyz(p) - fc(p)).norm())
            .fold(0.0, f64::max);
        table.push((n, e));
    }
    Ok(table)
}

/// Round-trip reconstruction: rebuild |W| and Delta from the coherent
/// projections alone (trace formulas) and compare with the model kernels.
#[derive(Debug, Clone, Serialize)]
pub struct RoundTripResiduals {
    pub modulus_sup: f64,
    pub delta_sup: f64,
}

pub fn reconstruct_propagator(
    m: &ModelSpace,
    pairs: &[(ChartPoint, ChartPoint)],
    triples: &[(ChartPoint, ChartPoint, ChartPoint)],
) -> Result<RoundTripResiduals> {
    let mut modulus_sup = 0.0f64;
    for &(x, y) in pairs {
        let qx = coherent_projection(m, x)?;
        let qy = coherent_projection(m, y)?;
        // tr(q_x q_y) = |<v_x, v_y>|^2
        let t = dense::trace(&qx.mat.dot(&qy.mat)).re.max(0.0);
        let rebuilt = t.sqrt();
        let model = m.weighted_modulus(x, y)?;
        modulus_sup = modulus_sup.max((rebuilt - model).abs());
    }
    let mut delta_sup = 0.0f64;
    for &(x, y, z) in triples {
        let qx = coherent_projection(m, x)?;
        let qy = coherent_projection(m, y)?;
        let qz = coherent_projection(m, z)?;
        // The trace orders the cyclic word oppositely to the kernel product:
        // tr(q_x q_y q_z) = W(y,x) W(z,y) W(x,z) = conj(Delta(x,y,z)).
        let rebuilt = dense::trace(&qx.mat.dot(&qy.mat).dot(&qz.mat)).conj();
        let model = m.delta(x, y, z)?;
        delta_sup = delta_sup.max((rebuilt - model).norm());
    }
    Ok(RoundTripResiduals { modulus_sup, delta_sup })
}

/// Chart point of an embedded sphere point, in whichever chart is stable.
pub fn chart_from_xyz(v: [f64; 3]) -> ChartPoint {
    let [x1, x2, x3] = v;
    if x3 <= 0.0 {
        ChartPoint::main(Complex64::new(x1, x2) / (1.0 - x3))
    } else {
        // z = (x1 + i x2)/(1 - x3) has |z| > 1; w = 1/z is stable.
        ChartPoint::secondary(Complex64::new(x1, -x2) / (1.0 + x3))
    }
}
