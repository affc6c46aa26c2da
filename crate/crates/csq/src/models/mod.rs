//! Catalog of concrete quantizable spaces: charts, measures, metric weights,
//! closed-form propagators and isometry actions.
//!
//! All kernels are exposed in two forms: the raw trivialization value and the
//! unitary-gauge (metric-weighted) value `W` with `W(x,x) = 1` and
//! `W(x,y) = conj(W(y,x))`. Cyclic products of either form agree, so 3-point
//! quantities are gauge-independent.

pub mod dilog;
pub mod podles;

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CsqError, Result};
use crate::numerics::{
    integrate_disk_vec, integrate_rect_vec, AdaptiveOpts, TruncatedDomain,
};

pub use dilog::dilog;
pub use podles::{podles_coefficients, PodlesData};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Integer power of a complex number by repeated squaring.
pub(crate) fn cpow(base: Complex64, n: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut b = base;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

/// Which chart a coordinate lives in.
///
/// Every model uses `Main`; the sphere also has a `Secondary` chart around
/// the point the main chart misses, with transition z = 1/w.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartId {
    Main,
    Secondary,
}

/// A point of a model space, as a complex coordinate in a named chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: ChartId,
    pub z: Complex64,
}

impl ChartPoint {
    pub fn main(z: Complex64) -> Self {
        ChartPoint { chart: ChartId::Main, z }
    }

    pub fn main_xy(x: f64, y: f64) -> Self {
        Self::main(Complex64::new(x, y))
    }

    pub fn secondary(z: Complex64) -> Self {
        ChartPoint { chart: ChartId::Secondary, z }
    }
}

/// The model catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// S^2 at level n (hbar = 1/n): Bergman kernel of O(n).
    Sphere { n: u32 },
    /// Flat plane, Gaussian coherent states.
    Plane { hbar: f64 },
    /// Upper half-plane, weight k = 2/hbar restricted to positive integers.
    HalfPlane { k: u32 },
    /// Podles sphere on its dense leaf; `terms` = 0 means adaptive truncation.
    Podles { hbar: f64, terms: usize },
    /// Quartic-zero Poisson structure restricted to its dense symplectic leaf.
    QuarticLeaf { hbar: f64 },
}

/// A model space with its chart data, measure and calibration scalar.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    kind: ModelKind,
    calibration: f64,
    podles: Option<Arc<PodlesData>>,
}

/// Chart disk radius on which the Podles series truncation is certified.
const PODLES_CHART_RADIUS: f64 = 6.0;

/// The propagator value at a pair of points.
#[derive(Debug, Clone, Copy)]
pub struct PropagatorSample {
    /// Omega(x, y) in the model's fixed trivialization.
    pub value: Complex64,
    /// |Omega(x, y)| including the metric weights of both fibers.
    pub weighted_modulus: f64,
}

impl ModelSpace {
    pub fn new(kind: ModelKind) -> Result<Self> {
        let podles = match &kind {
            ModelKind::Sphere { n } => {
                if *n == 0 {
                    return Err(CsqError::Param("sphere level n must be >= 1".into()));
                }
                None
            }
            ModelKind::Plane { hbar } | ModelKind::QuarticLeaf { hbar } => {
                if !(*hbar > 0.0) {
                    return Err(CsqError::Param(format!("hbar must be positive, got {hbar}")));
                }
                None
            }
            ModelKind::HalfPlane { k } => {
                if *k == 0 {
                    return Err(CsqError::Param("half-plane weight k must be >= 1".into()));
                }
                None
            }
            ModelKind::Podles { hbar, terms } => {
                if !(*hbar > 0.0) {
                    return Err(CsqError::Param(format!("hbar must be positive, got {hbar}")));
                }
                Some(Arc::new(PodlesData::build(*hbar, *terms, PODLES_CHART_RADIUS)?))
            }
        };
        Ok(ModelSpace { kind, calibration: 1.0, podles })
    }

    pub fn sphere(n: u32) -> Result<Self> {
        Self::new(ModelKind::Sphere { n })
    }

    pub fn plane(hbar: f64) -> Result<Self> {
        Self::new(ModelKind::Plane { hbar })
    }

    pub fn half_plane(k: u32) -> Result<Self> {
        Self::new(ModelKind::HalfPlane { k })
    }

    pub fn podles(hbar: f64) -> Result<Self> {
        Self::new(ModelKind::Podles { hbar, terms: 0 })
    }

    pub fn quartic_leaf(hbar: f64) -> Result<Self> {
        Self::new(ModelKind::QuarticLeaf { hbar })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn calibration(&self) -> f64 {
        self.calibration
    }

    /// A copy with the measure rescaled by `c` (values are immutable).
    pub fn with_calibration(&self, c: f64) -> Self {
        assert!(c > 0.0);
        let mut m = self.clone();
        m.calibration = c;
        m
    }

    pub fn podles_data(&self) -> Option<&PodlesData> {
        self.podles.as_deref()
    }

    /// Checks that the point is in a valid chart of this model.
    pub fn validate_point(&self, p: ChartPoint) -> Result<()> {
        match &self.kind {
            ModelKind::Sphere { .. } => Ok(()),
            ModelKind::Plane { .. } => match p.chart {
                ChartId::Main => Ok(()),
                ChartId::Secondary => Err(CsqError::ChartViolation {
                    x: p.z.re,
                    y: p.z.im,
                    reason: "plane has a single chart".into(),
                }),
            },
            ModelKind::HalfPlane { .. } => {
                if p.chart != ChartId::Main {
                    return Err(CsqError::ChartViolation {
                        x: p.z.re,
                        y: p.z.im,
                        reason: "half-plane has a single chart".into(),
                    });
                }
                if p.z.im > 0.0 {
                    Ok(())
                } else {
                    Err(CsqError::ChartViolation {
                        x: p.z.re,
                        y: p.z.im,
                        reason: "half-plane requires Im(z) > 0".into(),
                    })
                }
            }
            ModelKind::Podles { .. } | ModelKind::QuarticLeaf { .. } => {
                if p.chart != ChartId::Main {
                    return Err(CsqError::ChartViolation {
                        x: p.z.re,
                        y: p.z.im,
                        reason: "leaf chart is the main chart".into(),
                    });
                }
                if p.z.norm_sqr() > 0.0 {
                    Ok(())
                } else {
                    Err(CsqError::ChartViolation {
                        x: 0.0,
                        y: 0.0,
                        reason: "degenerate point z = 0 excluded from the leaf".into(),
                    })
                }
            }
        }
    }

    /// Squared norm of the unit trivializing frame at the point.
    pub fn metric_weight(&self, p: ChartPoint) -> Result<f64> {
        self.validate_point(p)?;
        match &self.kind {
            ModelKind::Sphere { n } => {
                let z = self.main_coord(p)?;
                Ok((1.0 + z.norm_sqr()).powi(-(*n as i32)))
            }
            // The other models are written in a unitary trivialization.
            _ => Ok(1.0),
        }
    }

    /// Density of calibration * dmu against Lebesgue area in the main chart.
    pub fn measure_density(&self, p: ChartPoint) -> Result<f64> {
        self.validate_point(p)?;
        let cal = self.calibration;
        match &self.kind {
            ModelKind::Sphere { n } => {
                let z = self.main_coord(p)?;
                let s = 1.0 + z.norm_sqr();
                Ok(cal * (*n as f64 + 1.0) / (std::f64::consts::PI * s * s))
            }
            ModelKind::Plane { hbar } => Ok(cal / (TWO_PI * hbar)),
            ModelKind::HalfPlane { k } => {
                let y = p.z.im;
                Ok(cal * (*k as f64) / (4.0 * std::f64::consts::PI * y * y))
            }
            ModelKind::Podles { hbar, .. } => {
                let data = self.podles.as_ref().unwrap();
                let t = p.z.norm_sqr();
                Ok(cal * data.kernel_series_real(t) * 2.0 / (1.0 + t).sqrt()
                    * (dilog(-t) / hbar).exp())
            }
            ModelKind::QuarticLeaf { .. } => Ok(cal / p.z.norm_sqr().powi(2)),
        }
    }

    fn main_coord(&self, p: ChartPoint) -> Result<Complex64> {
        match p.chart {
            ChartId::Main => Ok(p.z),
            ChartId::Secondary => {
                if p.z.norm_sqr() == 0.0 {
                    Err(CsqError::ChartViolation {
                        x: 0.0,
                        y: 0.0,
                        reason: "pole not covered by the main trivialization".into(),
                    })
                } else {
                    Ok(p.z.finv())
                }
            }
        }
    }

    /// Evaluates the closed-form propagator at a pair of points.
    pub fn eval_propagator(&self, x: ChartPoint, y: ChartPoint) -> Result<PropagatorSample> {
        self.validate_point(x)?;
        self.validate_point(y)?;
        match &self.kind {
            ModelKind::Sphere { n } => {
                let zx = self.main_coord(x)?;
                let zy = self.main_coord(y)?;
                let base = (1.0 + zx.conj() * zy) / (1.0 + zx.norm_sqr());
                let value = cpow(base, *n);
                let wm = sphere_weighted_mod(spinor(x), spinor(y), *n);
                Ok(PropagatorSample { value, weighted_modulus: wm })
            }
            ModelKind::Plane { hbar } => {
                let v = plane_w(x.z, y.z, *hbar);
                Ok(PropagatorSample { value: v, weighted_modulus: v.norm() })
            }
            ModelKind::HalfPlane { k } => {
                let v = halfplane_w(x.z, y.z, *k);
                Ok(PropagatorSample { value: v, weighted_modulus: v.norm() })
            }
            ModelKind::Podles { .. } => {
                let data = self.podles.as_ref().unwrap();
                let v = podles_w(data, x.z, y.z)?;
                Ok(PropagatorSample { value: v, weighted_modulus: v.norm() })
            }
            ModelKind::QuarticLeaf { hbar } => {
                let v = quartic_w(x.z, y.z, *hbar)?;
                Ok(PropagatorSample { value: v, weighted_modulus: v.norm() })
            }
        }
    }

    /// The unitary-gauge propagator W(x, y): unit diagonal, conjugate
    /// symmetric, |W| equal to the weighted modulus.
    pub fn weighted_value(&self, x: ChartPoint, y: ChartPoint) -> Result<Complex64> {
        match &self.kind {
            ModelKind::Sphere { n } => {
                self.validate_point(x)?;
                self.validate_point(y)?;
                let zx = self.main_coord(x)?;
                let zy = self.main_coord(y)?;
                let sx = (1.0 + zx.norm_sqr()).sqrt();
                let sy = (1.0 + zy.norm_sqr()).sqrt();
                let base = (1.0 + zx.conj() * zy) / (sx * sy);
                Ok(cpow(base, *n))
            }
            _ => Ok(self.eval_propagator(x, y)?.value),
        }
    }

    pub fn weighted_modulus(&self, x: ChartPoint, y: ChartPoint) -> Result<f64> {
        match &self.kind {
            ModelKind::Sphere { n } => {
                self.validate_point(x)?;
                self.validate_point(y)?;
                Ok(sphere_weighted_mod(spinor(x), spinor(y), *n))
            }
            _ => Ok(self.eval_propagator(x, y)?.weighted_modulus),
        }
    }

    /// Metric-weighted 3-point value Delta(x,y,z) = W(x,y) W(y,z) W(z,x).
    pub fn delta(&self, x: ChartPoint, y: ChartPoint, z: ChartPoint) -> Result<Complex64> {
        Ok(self.weighted_value(x, y)? * self.weighted_value(y, z)? * self.weighted_value(z, x)?)
    }
}

// ---------------------------------------------------------------------------
// kernels

/// Unit spinor of a sphere chart point; stable in both charts.
pub fn spinor(p: ChartPoint) -> [Complex64; 2] {
    let s = (1.0 + p.z.norm_sqr()).sqrt();
    match p.chart {
        ChartId::Main => [Complex64::new(1.0 / s, 0.0), p.z.conj() / s],
        ChartId::Secondary => [p.z.conj() / s, Complex64::new(1.0 / s, 0.0)],
    }
}

/// Unit spinor from a point of the unit sphere in R^3 (phase arbitrary).
pub fn spinor_from_xyz(v: [f64; 3]) -> [Complex64; 2] {
    let [x1, x2, x3] = v;
    if x3 <= 0.0 {
        // south-friendly gauge: (1, z-bar)/sqrt(1+|z|^2)
        let d = (2.0 * (1.0 - x3)).sqrt();
        [
            Complex64::new((0.5 * (1.0 - x3)).sqrt(), 0.0),
            Complex64::new(x1 / d, -x2 / d),
        ]
    } else {
        // north-friendly gauge
        let d = (2.0 * (1.0 + x3)).sqrt();
        [
            Complex64::new(x1 / d, x2 / d),
            Complex64::new((0.5 * (1.0 + x3)).sqrt(), 0.0),
        ]
    }
}

/// Cartesian coordinates of a sphere chart point.
pub fn sphere_xyz(p: ChartPoint) -> [f64; 3] {
    let t = p.z.norm_sqr();
    let s = 1.0 + t;
    match p.chart {
        ChartId::Main => [2.0 * p.z.re / s, 2.0 * p.z.im / s, (t - 1.0) / s],
        ChartId::Secondary => [2.0 * p.z.re / s, -2.0 * p.z.im / s, (1.0 - t) / s],
    }
}

pub(crate) fn inner2(a: [Complex64; 2], b: [Complex64; 2]) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Embedded coordinates of the sphere point a unit spinor represents.
pub fn xyz_from_spinor(xi: [Complex64; 2]) -> [f64; 3] {
    let w = 2.0 * xi[0] * xi[1].conj();
    [w.re, w.im, xi[1].norm_sqr() - xi[0].norm_sqr()]
}

fn sphere_weighted_mod(a: [Complex64; 2], b: [Complex64; 2], n: u32) -> f64 {
    inner2(a, b).norm().powi(n as i32)
}

pub(crate) fn plane_w(x: Complex64, y: Complex64, hbar: f64) -> Complex64 {
    let expo = (2.0 * x * y.conj() - x.norm_sqr() - y.norm_sqr()) / (2.0 * hbar);
    expo.exp()
}

pub(crate) fn halfplane_w(x: Complex64, y: Complex64, k: u32) -> Complex64 {
    let base = Complex64::new(0.0, 2.0) * (x.im * y.im).sqrt() / (x - y.conj());
    cpow(base, k)
}

pub(crate) fn podles_w(data: &PodlesData, x: Complex64, y: Complex64) -> Result<Complex64> {
    let r2 = data.radius * data.radius;
    for t in [x.norm_sqr(), y.norm_sqr()] {
        if t > r2 {
            return Err(CsqError::Param(format!(
                "podles series truncation certified only for |z| <= {}, got |z|^2 = {t}",
                data.radius
            )));
        }
    }
    let num = data.kernel_series(x.conj() * y);
    let den = (data.kernel_series_real(x.norm_sqr()) * data.kernel_series_real(y.norm_sqr())).sqrt();
    Ok(num / den)
}

pub(crate) fn quartic_w(x: Complex64, y: Complex64, hbar: f64) -> Result<Complex64> {
    if x.norm_sqr() == 0.0 || y.norm_sqr() == 0.0 {
        return Err(CsqError::ChartViolation {
            x: 0.0,
            y: 0.0,
            reason: "quartic leaf excludes z = 0".into(),
        });
    }
    let (lambda, _) = leaf_reduce_quartic(x, y)?;
    let x4 = x.norm_sqr() * x.norm_sqr();
    let expo = (-lambda.norm_sqr() * x4 + lambda.conj() * x - lambda * x.conj()) / (4.0 * hbar);
    Ok(expo.exp())
}

/// Solves t(x, lambda) = y on the quartic leaf: the unique arrow from x to y
/// in pair form, together with the Jacobian density of the source-fiber Haar
/// measure pushed to the leaf.
pub fn leaf_reduce_quartic(x: Complex64, y: Complex64) -> Result<(Complex64, f64)> {
    if x.norm_sqr() == 0.0 || y.norm_sqr() == 0.0 {
        return Err(CsqError::ChartViolation {
            x: 0.0,
            y: 0.0,
            reason: "quartic leaf excludes z = 0".into(),
        });
    }
    let lambda = (y - x) / (y * x.norm_sqr() * x.conj());
    // |x|^4 |dlambda/dy|^2 = 1/|y|^4
    let jacobian_density = 1.0 / (y.norm_sqr() * y.norm_sqr());
    Ok((lambda, jacobian_density))
}

// ---------------------------------------------------------------------------
// isometries

/// Orientation-preserving isometries of the models that have them.
#[derive(Debug, Clone, Copy)]
pub enum Isometry {
    /// z -> e^{i angle} z + translation on the plane.
    PlaneMotion { angle: f64, translation: Complex64 },
    /// Real Moebius map z -> (a z + b)/(c z + d), det = 1, on the half-plane.
    MobiusReal { m: [[f64; 2]; 2] },
    /// SU(2) Moebius map z -> (a z + b)/(-conj(b) z + conj(a)) on the sphere.
    Su2 { a: Complex64, b: Complex64 },
}

impl Isometry {
    pub fn mobius_real(m: [[f64; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if (det - 1.0).abs() > 1e-12 {
            return Err(CsqError::Param(format!("Moebius matrix must have det 1, got {det}")));
        }
        Ok(Isometry::MobiusReal { m })
    }

    pub fn su2(a: Complex64, b: Complex64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(CsqError::Param(format!("SU(2) parameters must satisfy |a|^2+|b|^2 = 1, got {n}")));
        }
        Ok(Isometry::Su2 { a, b })
    }

    /// Rotation about the y-axis moving the chart pole, useful for
    /// repositioning sphere evaluation sets.
    pub fn su2_y_rotation(beta: f64) -> Self {
        Isometry::Su2 {
            a: Complex64::new((beta / 2.0).cos(), 0.0),
            b: Complex64::new((beta / 2.0).sin(), 0.0),
        }
    }

    /// Group product: acting by `self` after `first` equals acting by
    /// `self.compose(first)`.
    pub fn compose(&self, first: &Isometry) -> Result<Isometry> {
        match (self, first) {
            (
                Isometry::PlaneMotion { angle: a2, translation: t2 },
                Isometry::PlaneMotion { angle: a1, translation: t1 },
            ) => Ok(Isometry::PlaneMotion {
                angle: a1 + a2,
                translation: Complex64::from_polar(1.0, *a2) * t1 + t2,
            }),
            (Isometry::MobiusReal { m: m2 }, Isometry::MobiusReal { m: m1 }) => {
                Ok(Isometry::MobiusReal {
                    m: [
                        [
                            m2[0][0] * m1[0][0] + m2[0][1] * m1[1][0],
                            m2[0][0] * m1[0][1] + m2[0][1] * m1[1][1],
                        ],
                        [
                            m2[1][0] * m1[0][0] + m2[1][1] * m1[1][0],
                            m2[1][0] * m1[0][1] + m2[1][1] * m1[1][1],
                        ],
                    ],
                })
            }
            (Isometry::Su2 { a: a2, b: b2 }, Isometry::Su2 { a: a1, b: b1 }) => Ok(Isometry::Su2 {
                a: a2 * a1 - b2 * b1.conj(),
                b: a2 * b1 + b2 * a1.conj(),
            }),
            _ => Err(CsqError::Param("cannot compose isometries of different models".into())),
        }
    }
}

impl ModelSpace {
    /// Image of a point under an isometry of the model.
    pub fn isometry_act(&self, g: &Isometry, p: ChartPoint) -> Result<ChartPoint> {
        self.validate_point(p)?;
        match (&self.kind, g) {
            (ModelKind::Plane { .. }, Isometry::PlaneMotion { angle, translation }) => {
                Ok(ChartPoint::main(Complex64::from_polar(1.0, *angle) * p.z + translation))
            }
            (ModelKind::HalfPlane { .. }, Isometry::MobiusReal { m }) => {
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                if (det - 1.0).abs() > 1e-12 {
                    return Err(CsqError::Param(format!("Moebius matrix must have det 1, got {det}")));
                }
                let num = m[0][0] * p.z + m[0][1];
                let den = m[1][0] * p.z + m[1][1];
                Ok(ChartPoint::main(num / den))
            }
            (ModelKind::Sphere { .. }, Isometry::Su2 { a, b }) => {
                // Act on homogeneous coordinates [1 : z] (main) or [w : 1]
                // (secondary); pick the chart that keeps |coordinate| <= 1.
                let (u0, u1) = match p.chart {
                    ChartId::Main => (Complex64::new(1.0, 0.0), p.z),
                    ChartId::Secondary => (p.z, Complex64::new(1.0, 0.0)),
                };
                let den = -b.conj() * u1 + a.conj() * u0;
                let num = a * u1 + b * u0;
                if den.norm() >= num.norm() {
                    Ok(ChartPoint::main(num / den))
                } else {
                    Ok(ChartPoint::secondary(den / num))
                }
            }
            _ => Err(CsqError::Param("isometry type does not match the model".into())),
        }
    }
}

// ---------------------------------------------------------------------------
// measure integrals

/// A scalar quadrature outcome with its error estimate and certified tail.
#[derive(Debug, Clone, Copy)]
pub struct QuadScalar {
    pub value: Complex64,
    pub err: f64,
    pub tail: f64,
}

/// Cayley transform: unit disk to the upper half-plane.
fn cayley_to_halfplane(w: Complex64) -> Complex64 {
    Complex64::new(0.0, 1.0) * (1.0 + w) / (1.0 - w)
}

impl ModelSpace {
    /// Integrates `g` against the calibrated measure over the whole model.
    /// Only available where the total measure is finite (sphere).
    pub fn measure_total(&self, tol: f64) -> Result<QuadScalar> {
        match &self.kind {
            ModelKind::Sphere { n } => {
                let cal = self.calibration;
                let density = cal * (*n as f64 + 1.0) / TWO_PI;
                let f = |phi: f64, _th: f64, out: &mut [Complex64]| {
                    out[0] = Complex64::new(density * (2.0 * phi).sin(), 0.0);
                };
                let r = integrate_rect_vec(
                    &f,
                    1,
                    [[0.0, std::f64::consts::FRAC_PI_2], [0.0, TWO_PI]],
                    &AdaptiveOpts::with_tol(tol),
                )?;
                Ok(QuadScalar { value: r.values[0], err: r.err_estimate, tail: 0.0 })
            }
            _ => Err(CsqError::Param("total measure is only supported for the sphere model".into())),
        }
    }

    /// I(x) = int |W(x,y)|^2 dmu(y), the probability-density integral.
    pub fn probability_integral(&self, x: ChartPoint, tol: f64) -> Result<QuadScalar> {
        self.pair_kernel_integral(x, None, KernelJob::Probability, tol)
    }

    /// (W * W)(x, y) = int W(x,z) W(z,y) dmu(z).
    pub fn convolution(&self, x: ChartPoint, y: ChartPoint, tol: f64) -> Result<QuadScalar> {
        self.pair_kernel_integral(x, Some(y), KernelJob::Convolution, tol)
    }

    /// Condition-5 integral int |W(x,y)| dmu(y).
    pub fn abs_integral(&self, x: ChartPoint, tol: f64) -> Result<QuadScalar> {
        self.pair_kernel_integral(x, None, KernelJob::AbsMass, tol)
    }

    /// (W * W * W)(x, y) by iterated quadrature (never via operator algebra).
    pub fn triple_convolution(&self, x: ChartPoint, y: ChartPoint, tol: f64) -> Result<QuadScalar> {
        match &self.kind {
            ModelKind::Sphere { n } => {
                // Fixed product rule exact for the polynomial integrand.
                let grid = sphere_quad_grid(*n, self.calibration);
                let sx = spinor(ChartPoint::main(self.main_coord(x)?));
                let sy = spinor(ChartPoint::main(self.main_coord(y)?));
                let n_ = *n;
                let inner: Vec<Complex64> = grid
                    .par_iter()
                    .map(|(sb, wb)| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (sc, wc) in &grid {
                            acc += cpow(inner2(*sc, *sb), n_) * cpow(inner2(sy, *sc), n_) * wc;
                        }
                        acc * cpow(inner2(*sb, sx), n_) * wb
                    })
                    .collect();
                let value: Complex64 = inner.iter().sum();
                Ok(QuadScalar { value, err: 1e-14, tail: 0.0 })
            }
            _ => {
                // Outer adaptive integral of W(x,a) * (W*W)(a,y).
                let inner_tol = tol / 10.0;
                let outer = |a: ChartPoint| -> Result<Complex64> {
                    let conv = self.convolution(a, y, inner_tol)?;
                    Ok(self.weighted_value(x, a)? * conv.value)
                };
                self.weighted_outer_integral(x, y, outer, tol)
            }
        }
    }

    fn weighted_outer_integral(
        &self,
        x: ChartPoint,
        y: ChartPoint,
        f: impl Fn(ChartPoint) -> Result<Complex64> + Sync,
        tol: f64,
    ) -> Result<QuadScalar> {
        // Only needed for the plane-like models in tests; integrate over a
        // generous Gaussian disk around the midpoint.
        let (hbar_eff, density) = match &self.kind {
            ModelKind::Plane { hbar } => (*hbar, self.calibration / (TWO_PI * hbar)),
            ModelKind::QuarticLeaf { hbar } => (2.0 * hbar, self.calibration),
            _ => return Err(CsqError::Param("outer integral not supported for this model".into())),
        };
        let (cx, cy) = match &self.kind {
            ModelKind::QuarticLeaf { .. } => (x.z.finv(), y.z.finv()),
            _ => (x.z, y.z),
        };
        let center = 0.5 * (cx + cy);
        let dom = TruncatedDomain::gaussian(center, 0.5 / hbar_eff, density, 1e-14 * tol.max(1e-10));
        // Inner failures are recorded and re-raised after the sweep; only the
        // measure-zero excluded point itself contributes nothing.
        let failure = std::sync::Mutex::new(None::<CsqError>);
        let g = |w: Complex64, out: &mut [Complex64]| {
            let p = match &self.kind {
                ModelKind::QuarticLeaf { .. } => {
                    if w.norm_sqr() == 0.0 {
                        out[0] = Complex64::new(0.0, 0.0);
                        return;
                    }
                    ChartPoint::main(w.finv())
                }
                _ => ChartPoint::main(w),
            };
            out[0] = match f(p) {
                Ok(v) => v * density,
                Err(e) => {
                    *failure.lock().unwrap() = Some(e);
                    Complex64::new(0.0, 0.0)
                }
            };
        };
        let r = integrate_disk_vec(&g, 1, &dom, &AdaptiveOpts::with_tol(tol))?;
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        Ok(QuadScalar { value: r.values[0], err: r.err_estimate, tail: r.tail_bound })
    }
}

#[derive(Clone, Copy, PartialEq)]
enum KernelJob {
    /// |W(x,z)|^2
    Probability,
    /// W(x,z) W(z,y)
    Convolution,
    /// |W(x,z)|
    AbsMass,
}

impl ModelSpace {
    fn pair_kernel_integral(
        &self,
        x: ChartPoint,
        y: Option<ChartPoint>,
        job: KernelJob,
        tol: f64,
    ) -> Result<QuadScalar> {
        self.validate_point(x)?;
        if let Some(y) = y {
            self.validate_point(y)?;
        }
        let cal = self.calibration;
        let opts = AdaptiveOpts::with_tol(tol);
        match &self.kind {
            ModelKind::Sphere { n } => {
                // Half-angle parametrization: every kernel product is a trig
                // polynomial in (phi, theta), so the cell rule superconverges.
                // Spinors are taken in the main-chart gauge to stay phase-
                // consistent with weighted_value.
                let n = *n;
                let sx = spinor(ChartPoint::main(self.main_coord(x)?));
                let sy = match y {
                    Some(y) => spinor(ChartPoint::main(self.main_coord(y)?)),
                    None => sx,
                };
                let density = cal * (n as f64 + 1.0) / TWO_PI;
                let f = |phi: f64, th: f64, out: &mut [Complex64]| {
                    let sz = spinor_phith(phi, th);
                    let jac = density * (2.0 * phi).sin();
                    out[0] = jac
                        * match job {
                            KernelJob::Probability => {
                                let m = inner2(sz, sx).norm().powi(2 * n as i32);
                                Complex64::new(m, 0.0)
                            }
                            KernelJob::Convolution => {
                                cpow(inner2(sz, sx) * inner2(sy, sz), n)
                            }
                            KernelJob::AbsMass => {
                                Complex64::new(inner2(sz, sx).norm().powi(n as i32), 0.0)
                            }
                        };
                };
                let r = integrate_rect_vec(
                    &f,
                    1,
                    [[0.0, std::f64::consts::FRAC_PI_2], [0.0, TWO_PI]],
                    &opts,
                )?;
                Ok(QuadScalar { value: r.values[0], err: r.err_estimate, tail: 0.0 })
            }
            ModelKind::Plane { hbar } => {
                let hbar = *hbar;
                let density = cal / (TWO_PI * hbar);
                let (center, decay, pref) = match (job, y) {
                    (KernelJob::Convolution, Some(y)) => {
                        let m = 0.5 * (x.z + y.z);
                        let pref = density * (-(x.z - y.z).norm_sqr() / (4.0 * hbar)).exp();
                        (m, 1.0 / hbar, pref)
                    }
                    (KernelJob::Probability, _) => (x.z, 1.0 / hbar, density),
                    (KernelJob::AbsMass, _) => (x.z, 0.5 / hbar, density),
                    _ => unreachable!(),
                };
                let dom = TruncatedDomain::gaussian(center, decay, pref, (tol * 1e-3).min(1e-12));
                let f = |z: Complex64, out: &mut [Complex64]| {
                    out[0] = density
                        * match job {
                            KernelJob::Probability => {
                                Complex64::new(plane_w(x.z, z, hbar).norm_sqr(), 0.0)
                            }
                            KernelJob::Convolution => {
                                plane_w(x.z, z, hbar) * plane_w(z, y.unwrap().z, hbar)
                            }
                            KernelJob::AbsMass => Complex64::new(plane_w(x.z, z, hbar).norm(), 0.0),
                        };
                };
                let r = integrate_disk_vec(&f, 1, &dom, &opts)?;
                Ok(QuadScalar { value: r.values[0], err: r.err_estimate, tail: r.tail_bound })
            }
            ModelKind::HalfPlane { k } => {
                // Cayley transform to the unit disk: the hyperbolic measure
                // becomes 4 dA/(1-|w|^2)^2 and the two-kernel integrands are
                // analytic up to the boundary for integer k >= 2.
                let k = *k;
                let dens_c = cal * (k as f64) / std::f64::consts::PI;
                if job == KernelJob::AbsMass {
                    // One kernel factor leaves a (1-|w|^2)^{k/2-2} boundary
                    // weight; the substitution u = 1 - v^2 removes the
                    // square-root singularity at odd k.
                    let mut o = opts.clone();
                    o.max_cells = o.max_cells.min(1 << 13);
                    let f = |v: f64, th: f64, out: &mut [Complex64]| {
                        let u = 1.0 - v * v;
                        let w = Complex64::from_polar(u, th);
                        let t = w.norm_sqr();
                        let z = cayley_to_halfplane(w);
                        // radial Jacobian u du = u * 2v dv
                        let jac = dens_c * u * 2.0 * v / ((1.0 - t) * (1.0 - t));
                        out[0] = Complex64::new(jac * halfplane_w(x.z, z, k).norm(), 0.0);
                    };
                    let r = integrate_rect_vec(&f, 1, [[0.0, 1.0], [0.0, TWO_PI]], &o)?;
                    return Ok(QuadScalar { value: r.values[0], err: r.err_estimate, tail: 0.0 });
                }
                let dom = TruncatedDomain::exact(Complex64::new(0.0, 0.0), 1.0);
                let f = |w: Complex64, out: &mut [Complex64]| {
                    let t = w.norm_sqr();
                    let z = cayley_to_halfplane(w);
                    let jac = dens_c / ((1.0 - t) * (1.0 - t));
                    out[0] = jac
                        * match job {
                            KernelJob::Probability => {
                                Complex64::new(halfplane_w(x.z, z, k).norm_sqr(), 0.0)
                            }
                            KernelJob::Convolution => {
                                halfplane_w(x.z, z, k) * halfplane_w(z, y.unwrap().z, k)
                            }
                            KernelJob::AbsMass => unreachable!(),
                        };
                };
                let r = integrate_disk_vec(&f, 1, &dom, &opts)?;
                Ok(QuadScalar { value: r.values[0], err: r.err_estimate, tail: 0.0 })
            }
            ModelKind::Podles { hbar, .. } => {
                let hbar = *hbar;
                let data = self.podles.clone().unwrap();
                let sxn = data.kernel_series_real(x.z.norm_sqr()).sqrt();
                let syn = y
                    .map(|y| data.kernel_series_real(y.z.norm_sqr()).sqrt())
                    .unwrap_or(sxn);
                // Integrate in (s, theta), z = e^{s + i theta}; the area
                // element contributes e^{2s}. The S(|z|^2) factor of the
                // measure cancels against the kernel normalizations, and the
                // weight e^{Li2/hbar} is folded into the kernel series term
                // by term so nothing overflows on the way.
                let s_hi = data.integration_s_hi();
                let s_lo = -20.0;
                let f = |s: f64, th: f64, out: &mut [Complex64]| {
                    let r = s.exp();
                    let z = Complex64::from_polar(r, th);
                    let t = z.norm_sqr();
                    let half_log_w = 0.5 * dilog(-t) / hbar;
                    let weight = cal * 2.0 / (1.0 + t).sqrt() * (r * r);
                    out[0] = weight
                        * match job {
                            KernelJob::Probability => {
                                let q = data
                                    .kernel_series_scaled(x.z.conj() * z, half_log_w)
                                    .norm_sqr()
                                    / (sxn * sxn);
                                Complex64::new(q, 0.0)
                            }
                            KernelJob::Convolution => {
                                data.kernel_series_scaled(x.z.conj() * z, half_log_w)
                                    * data.kernel_series_scaled(z.conj() * y.unwrap().z, half_log_w)
                                    / (sxn * syn)
                            }
                            KernelJob::AbsMass => {
                                // |W(x,z)| S(t) w(t): one series factor and
                                // sqrt(S(t) e^{Li2/hbar}) remain.
                                let a = data
                                    .kernel_series_scaled(x.z.conj() * z, half_log_w)
                                    .norm();
                                let st = data
                                    .kernel_series_scaled(Complex64::new(t, 0.0), 2.0 * half_log_w)
                                    .re
                                    .max(0.0)
                                    .sqrt();
                                Complex64::new(a * st / sxn, 0.0)
                            }
                        };
                };
                let r = integrate_rect_vec(&f, 1, [[s_lo, s_hi], [0.0, TWO_PI]], &opts)?;
                // Certified tails: the omitted small disk has area pi e^{2 s_lo}
                // and bounded integrand; the large-radius tail is the
                // log-normal envelope bound.
                let lo_tail =
                    (2.0 * s_lo).exp() * std::f64::consts::PI * cal * 2.0 * (1.0 + data.coeffs[0]);
                Ok(QuadScalar {
                    value: r.values[0],
                    err: r.err_estimate,
                    tail: lo_tail + cal * data.integrand_tail_bound(),
                })
            }
            ModelKind::QuarticLeaf { hbar } => {
                // Substitute w = 1/z: the leaf measure density 1/|z|^4 becomes
                // Lebesgue measure in w, and the kernel is a plane Gaussian
                // with hbar' = 2 hbar.
                let hbar_eff = 2.0 * hbar;
                let wx = x.z.finv();
                let wy = y.map(|y| y.z.finv()).unwrap_or(wx);
                let density = cal;
                let (center, decay, pref) = match job {
                    KernelJob::Convolution => {
                        let m = 0.5 * (wx + wy);
                        let pref = density * (-(wx - wy).norm_sqr() / (4.0 * hbar_eff)).exp();
                        (m, 1.0 / hbar_eff, pref)
                    }
                    KernelJob::Probability => (wx, 1.0 / hbar_eff, density),
                    KernelJob::AbsMass => (wx, 0.5 / hbar_eff, density),
                };
                let dom = TruncatedDomain::gaussian(center, decay, pref, (tol * 1e-3).min(1e-12));
                let hb = *hbar;
                let f = |w: Complex64, out: &mut [Complex64]| {
                    if w.norm_sqr() == 0.0 {
                        out[0] = Complex64::new(0.0, 0.0);
                        return;
                    }
                    let z = w.finv();
                    let a = quartic_w(x.z, z, hb).unwrap();
                    out[0] = density
                        * match job {
                            KernelJob::Probability => Complex64::new(a.norm_sqr(), 0.0),
                            KernelJob::Convolution => a * quartic_w(z, y.unwrap().z, hb).unwrap(),
                            KernelJob::AbsMass => Complex64::new(a.norm(), 0.0),
                        };
                };
                let r = integrate_disk_vec(&f, 1, &dom, &opts)?;
                Ok(QuadScalar { value: r.values[0], err: r.err_estimate, tail: r.tail_bound })
            }
        }
    }
}

/// Spinor of the sphere point with u = |z|^2/(1+|z|^2) in [0,1] and angle th.
pub(crate) fn spinor_uth(u: f64, th: f64) -> [Complex64; 2] {
    [
        Complex64::new((1.0 - u).max(0.0).sqrt(), 0.0),
        Complex64::from_polar(u.max(0.0).sqrt(), -th),
    ]
}

/// Spinor in the half-angle parametrization u = sin^2(phi), phi in [0, pi/2].
pub(crate) fn spinor_phith(phi: f64, th: f64) -> [Complex64; 2] {
    [
        Complex64::new(phi.cos(), 0.0),
        Complex64::from_polar(phi.sin(), -th),
    ]
}

/// Cartesian sphere point for the (u, theta) parametrization.
pub(crate) fn xyz_uth(u: f64, th: f64) -> [f64; 3] {
    let rho = 2.0 * (u * (1.0 - u)).max(0.0).sqrt();
    [rho * th.cos(), rho * th.sin(), 2.0 * u - 1.0]
}

/// Fixed product quadrature grid on the sphere, exact for the polynomial
/// integrands of level n; returns (spinor, weight * measure density).
pub(crate) fn sphere_quad_grid(n: u32, cal: f64) -> Vec<([Complex64; 2], f64)> {
    let mu = (2 * n + 8) as usize;
    let mth = (4 * n + 8) as usize;
    let (gx, gw) = crate::numerics::gauss_legendre(mu);
    let density = cal * (n as f64 + 1.0) / TWO_PI;
    let mut grid = Vec::with_capacity(mu * mth);
    for i in 0..mu {
        let u = 0.5 * (gx[i] + 1.0);
        let wu = 0.5 * gw[i];
        for j in 0..mth {
            let th = TWO_PI * j as f64 / mth as f64;
            let wth = TWO_PI / mth as f64;
            grid.push((spinor_uth(u, th), wu * wth * density));
        }
    }
    grid
}

#[cfg(test)]
mod tests;
