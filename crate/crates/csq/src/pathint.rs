//! Time-sliced path integrals: products of propagator values over
//! partitioned paths, connection holonomy, and cylinder-function
//! consistency across nested partitions.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CsqError, Result};
use crate::models::{sphere_quad_grid, spinor, xyz_from_spinor, ChartPoint, ModelKind, ModelSpace};
use crate::models::{cpow, inner2};
use crate::numerics::{gauss_legendre, Partition};

/// A parametric path t -> chart point on [0, 1].
#[derive(Debug, Clone)]
pub enum PathSpec {
    /// |z| = radius traversed once counterclockwise (closed).
    Latitude { radius: f64 },
    /// Circle of the given center and radius (closed).
    Circle { center: Complex64, radius: f64 },
    /// Straight segment from a to b (open).
    Segment { a: Complex64, b: Complex64 },
    /// a -> b -> a along the segment (closed, zero enclosed area).
    BackAndForth { a: Complex64, b: Complex64 },
}

impl PathSpec {
    pub fn eval(&self, t: f64) -> ChartPoint {
        let z = match self {
            PathSpec::Latitude { radius } => {
                Complex64::from_polar(*radius, 2.0 * std::f64::consts::PI * t)
            }
            PathSpec::Circle { center, radius } => {
                center + Complex64::from_polar(*radius, 2.0 * std::f64::consts::PI * t)
            }
            PathSpec::Segment { a, b } => a + (b - a) * t,
            PathSpec::BackAndForth { a, b } => {
                let s = if t <= 0.5 { 2.0 * t } else { 2.0 * (1.0 - t) };
                a + (b - a) * s
            }
        };
        ChartPoint::main(z)
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self, PathSpec::Segment { .. })
    }

    /// A length scale used to pick finite-difference steps.
    pub fn scale(&self) -> f64 {
        match self {
            PathSpec::Latitude { radius } | PathSpec::Circle { radius, .. } => radius.abs().max(1e-3),
            PathSpec::Segment { a, b } | PathSpec::BackAndForth { a, b } => (b - a).norm().max(1e-3),
        }
    }
}

/// Ordered product of weighted propagator values over a partition.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlicedTransport {
    pub product_re: f64,
    pub product_im: f64,
    pub modulus_deficiency: f64,
}

impl SlicedTransport {
    pub fn product(&self) -> Complex64 {
        Complex64::new(self.product_re, self.product_im)
    }
}

pub fn sliced_product(
    m: &ModelSpace,
    path: &PathSpec,
    partition: &Partition,
) -> Result<SlicedTransport> {
    let mut prod = Complex64::new(1.0, 0.0);
    for w in partition.times().windows(2) {
        let x = path.eval(w[0]);
        let y = path.eval(w[1]);
        prod *= m.weighted_value(x, y)?;
    }
    Ok(SlicedTransport {
        product_re: prod.re,
        product_im: prod.im,
        modulus_deficiency: 1.0 - prod.norm(),
    })
}

/// Integrates the connection 1-form A(t) = d/ds log W(path(t), path(t+s))
/// at s = 0 (4th-order central differences) over a closed path with a
/// composite Gauss rule, returning exp of the loop integral.
pub fn connection_holonomy_oracle(
    m: &ModelSpace,
    path: &PathSpec,
    panels: usize,
) -> Result<Complex64> {
    if !path.is_closed() {
        return Err(CsqError::Param("holonomy needs a closed path".into()));
    }
    let ds = 1e-4 / path.scale().max(1.0);
    let a_of = |t: f64| -> Result<Complex64> {
        let base = path.eval(t);
        let lw = |s: f64| -> Result<Complex64> {
            Ok(m.weighted_value(base, path.eval((t + s).rem_euclid(1.0)))?.ln())
        };
        // 4th-order central difference in s
        Ok((-lw(2.0 * ds)? + 8.0 * lw(ds)? - 8.0 * lw(-ds)? + lw(-2.0 * ds)?)
            / Complex64::new(12.0 * ds, 0.0))
    };
    let (gx, gw) = gauss_legendre(8);
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = p as f64 / panels as f64;
        let hi = (p + 1) as f64 / panels as f64;
        let h = 0.5 * (hi - lo);
        let c = 0.5 * (hi + lo);
        for (x, w) in gx.iter().zip(&gw) {
            acc += a_of(c + h * x)? * Complex64::new(w * h, 0.0);
        }
    }
    Ok(acc.exp())
}

/// Convergence table of sliced products against the holonomy oracle.
#[derive(Debug, Clone, Serialize)]
pub struct HolonomyRow {
    pub intervals: usize,
    pub phase_error: f64,
    pub modulus_deficiency: f64,
}

pub fn holonomy_convergence(
    m: &ModelSpace,
    path: &PathSpec,
    levels: &[usize],
) -> Result<Vec<HolonomyRow>> {
    let oracle = connection_holonomy_oracle(m, path, 32)?;
    let target = oracle.arg();
    levels
        .iter()
        .map(|&k| {
            let st = sliced_product(m, path, &Partition::uniform(k))?;
            let raw = st.product().arg() - target;
            let wrapped = (raw + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI)
                - std::f64::consts::PI;
            Ok(HolonomyRow {
                intervals: k,
                phase_error: wrapped.abs(),
                modulus_deficiency: st.modulus_deficiency,
            })
        })
        .collect()
}

/// Cylinder-function kernel on the sphere by iterated quadrature over a
/// fixed exact product grid: inserts the functions at consecutive slots and
/// resolution-of-identity factors at the extra slots.
///
/// `slots` lists one entry per intermediate time; `None` means no function
/// is inserted there (a bare resolution factor).
pub fn cylinder_kernel_quadrature(
    m: &ModelSpace,
    x: ChartPoint,
    y: ChartPoint,
    slots: &[Option<&(dyn Fn([f64; 3]) -> Complex64 + Sync)>],
) -> Result<Complex64> {
    let n = match m.kind() {
        ModelKind::Sphere { n } => *n,
        _ => return Err(CsqError::Param("cylinder kernels need the finite-rank sphere model".into())),
    };
    let grid = sphere_quad_grid(n, m.calibration());
    let sx = spinor(x);
    let sy = spinor(y);
    // state vector over grid points, starting from W(x, p_i) f_1(p_i) w_i
    let mut state: Vec<Complex64> = Vec::with_capacity(grid.len());
    let first = slots
        .first()
        .ok_or_else(|| CsqError::Param("cylinder kernel needs at least one slot".into()))?;
    for (sp, w) in &grid {
        let mut v = cpow(inner2(*sp, sx), n) * *w;
        if let Some(f) = first {
            v *= f(xyz_from_spinor(*sp));
        }
        state.push(v);
    }
    for slot in &slots[1..] {
        let mut next = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (jdx, (spj, wj)) in grid.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, (spi, _)) in grid.iter().enumerate() {
                acc += state[idx] * cpow(inner2(*spj, *spi), n);
            }
            acc *= *wj;
            if let Some(f) = slot {
                acc *= f(xyz_from_spinor(*spj));
            }
            next[jdx] = acc;
        }
        state = next;
    }
    let mut kernel = Complex64::new(0.0, 0.0);
    for (idx, (spi, _)) in grid.iter().enumerate() {
        kernel += state[idx] * cpow(inner2(sy, *spi), n);
    }
    Ok(kernel)
}

/// Matrix route for the same kernel: v(y)* Q_{f_m} ... Q_{f_1} v(x), with
/// identity factors skipped.
pub fn cylinder_kernel_matrix(
    m: &ModelSpace,
    x: ChartPoint,
    y: ChartPoint,
    fs: &[&(dyn Fn([f64; 3]) -> Complex64 + Sync)],
    tol: f64,
) -> Result<Complex64> {
    let n = match m.kind() {
        ModelKind::Sphere { n } => *n,
        _ => return Err(CsqError::Param("cylinder kernels need the finite-rank sphere model".into())),
    };
    let dim = (n + 1) as usize;
    let mut acc = crate::quantize::dense::identity(dim);
    // product Q_{f_m} ... Q_{f_1}
    for f in fs.iter().rev() {
        let qf = crate::quantize::build_q(m, *f, tol)?;
        acc = acc.dot(&qf.mat);
    }
    Ok(crate::quantize::operator_kernel(n, &acc, x, y))
}

/// Max pairwise discrepancy between the matrix kernel and the iterated
/// quadrature evaluated on a coarse and a refined partition.
pub fn cylinder_consistency(
    m: &ModelSpace,
    x: ChartPoint,
    y: ChartPoint,
    fs: &[&(dyn Fn([f64; 3]) -> Complex64 + Sync)],
    extra_slots: usize,
    tol: f64,
) -> Result<f64> {
    let matrix = cylinder_kernel_matrix(m, x, y, fs, tol)?;
    let coarse_slots: Vec<Option<&(dyn Fn([f64; 3]) -> Complex64 + Sync)>> =
        fs.iter().map(|f| Some(*f)).collect();
    let coarse = cylinder_kernel_quadrature(m, x, y, &coarse_slots)?;
    let mut fine_slots = coarse_slots.clone();
    for _ in 0..extra_slots {
        fine_slots.insert(1.min(fine_slots.len()), None);
        fine_slots.push(None);
    }
    let fine = cylinder_kernel_quadrature(m, x, y, &fine_slots)?;
    let d1 = (matrix - coarse).norm();
    let d2 = (matrix - fine).norm();
    let d3 = (coarse - fine).norm();
    Ok(d1.max(d2).max(d3))
}
