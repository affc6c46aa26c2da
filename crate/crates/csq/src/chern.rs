//! The 3-point function and its cocycle normalization, curvature extraction
//! by the van Est stencil, mesh Chern numbers from face phases, and the 1-D
//! Riemann-sum lemma.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CsqError, Result};
use crate::models::{cpow, inner2, spinor_from_xyz, ChartPoint, ModelKind, ModelSpace};
use crate::numerics::{integrate_interval, mixed_second_difference, AdaptiveOpts, Partition, TriangleMesh};

/// The 3-point function at one triple.
#[derive(Debug, Clone, Copy)]
pub struct ThreePointSample {
    /// Delta = W(x,y) W(y,z) W(z,x), metric-weighted (gauge-independent).
    pub delta: Complex64,
    /// [Delta] = Delta(x,y,z) / Delta(x,x,z).
    pub normalized: Complex64,
    /// Principal log of [Delta], anchored at log 1 = 0 on the diagonal;
    /// only issued when every pairwise weighted modulus exceeds 0.1.
    pub log_value: Option<Complex64>,
}

pub fn three_point(
    m: &ModelSpace,
    x: ChartPoint,
    y: ChartPoint,
    z: ChartPoint,
) -> Result<ThreePointSample> {
    let delta = m.delta(x, y, z)?;
    let wxz = m.weighted_modulus(x, z)?;
    let normalized = delta / (wxz * wxz);
    let wxy = m.weighted_modulus(x, y)?;
    let wyz = m.weighted_modulus(y, z)?;
    let min_mod = wxy.min(wyz).min(wxz);
    let log_value = if min_mod > 0.1 { Some(normalized.ln()) } else { None };
    Ok(ThreePointSample { delta, normalized, log_value })
}

/// Like [`three_point`] but failing loudly when the log is unavailable.
pub fn three_point_log(
    m: &ModelSpace,
    x: ChartPoint,
    y: ChartPoint,
    z: ChartPoint,
) -> Result<Complex64> {
    let s = three_point(m, x, y, z)?;
    s.log_value.ok_or_else(|| {
        let wxy = m.weighted_modulus(x, y).unwrap_or(0.0);
        let wyz = m.weighted_modulus(y, z).unwrap_or(0.0);
        let wxz = m.weighted_modulus(x, z).unwrap_or(0.0);
        CsqError::TripleTooSpread { min_modulus: wxy.min(wyz).min(wxz), threshold: 0.1 }
    })
}

/// Curvature by the van Est stencil: the antisymmetrized mixed second
/// difference of log [Delta](x, x+su, x+tv), times 2!.
pub fn vanest_curvature(
    m: &ModelSpace,
    x: ChartPoint,
    u: Complex64,
    v: Complex64,
    h: f64,
) -> Result<Complex64> {
    let d = |a: Complex64, b: Complex64| -> Result<Complex64> {
        mixed_second_difference(
            |s, t| {
                let y = ChartPoint { chart: x.chart, z: x.z + s * a };
                let z = ChartPoint { chart: x.chart, z: x.z + t * b };
                three_point_log(m, x, y, z)
            },
            h,
        )
    };
    Ok(d(u, v)? - d(v, u)?)
}

/// Result of the mesh field-strength sum.
#[derive(Debug, Clone, Copy)]
pub struct ChernOutcome {
    pub chern_number: i64,
    /// |sum/(2 pi) - nearest integer|.
    pub residual: f64,
    pub max_face_phase: f64,
}

/// C = (1/2 pi) sum over faces of arg Delta(v0, v1, v2), with the principal
/// argument per face; faces must stay clear of the branch cut.
pub fn chern_number(m: &ModelSpace, mesh: &TriangleMesh) -> Result<ChernOutcome> {
    let n = match m.kind() {
        ModelKind::Sphere { n } => *n,
        _ => return Err(CsqError::Param("mesh Chern numbers are computed on the sphere model".into())),
    };
    let spinors: Vec<[Complex64; 2]> = mesh.vertices.iter().map(|&v| spinor_from_xyz(v)).collect();
    let phases: Vec<f64> = mesh
        .faces
        .par_iter()
        .map(|f| {
            // Bargmann product around the oriented face; per-vertex phase
            // gauge cancels. Orientation fixed so outward-oriented meshes
            // report +n.
            let t = inner2(spinors[f[0]], spinors[f[1]])
                * inner2(spinors[f[1]], spinors[f[2]])
                * inner2(spinors[f[2]], spinors[f[0]]);
            cpow(t, n).arg()
        })
        .collect();
    let max_face_phase = phases.iter().map(|p| p.abs()).fold(0.0, f64::max);
    if max_face_phase >= std::f64::consts::PI - 0.1 {
        return Err(CsqError::MeshTooCoarse { n, max_phase: max_face_phase, margin: 0.1 });
    }
    let total: f64 = phases.iter().sum();
    let c = total / (2.0 * std::f64::consts::PI);
    let rounded = c.round();
    Ok(ChernOutcome {
        chern_number: rounded as i64,
        residual: (c - rounded).abs(),
        max_face_phase,
    })
}

/// Sum of F over consecutive points of the partition restricted to [a, b],
/// and its deviation from the quadrature of the derivative target f.
pub fn riemann_sum_1d(
    big_f: &(dyn Fn(f64, f64) -> f64 + Sync),
    f: &(dyn Fn(f64) -> f64 + Sync),
    partition: &Partition,
    a: f64,
    b: f64,
) -> Result<(f64, f64)> {
    assert!(a < b && (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
    let mut pts = vec![a];
    pts.extend(partition.times().iter().cloned().filter(|&t| t > a && t < b));
    pts.push(b);
    let sum: f64 = pts.windows(2).map(|w| big_f(w[0], w[1])).sum();
    let (integral, _) = integrate_interval(f, a, b, &AdaptiveOpts::with_tol(1e-12))?;
    Ok((sum, (sum - integral).abs()))
}
