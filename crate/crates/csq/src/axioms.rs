//! Propagator verification: measure calibration, the five defining
//! conditions, isometry invariance of the 3-point class and the cocycle
//! trivialization identity, all checked by quadrature over sample sets.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CsqError, Result};
use crate::models::{ChartPoint, Isometry, ModelKind, ModelSpace};

/// Per-model tolerance ladder: closed-form arithmetic vs quadrature error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub pointwise: f64,
    pub quadrature: f64,
}

pub fn default_tolerances(kind: &ModelKind) -> Tolerances {
    match kind {
        // finite-rank kernel identities are exact up to quadrature
        ModelKind::Sphere { .. } => Tolerances { pointwise: 1e-10, quadrature: 1e-8 },
        ModelKind::Podles { .. } | ModelKind::QuarticLeaf { .. } => {
            Tolerances { pointwise: 1e-10, quadrature: 1e-4 }
        }
        _ => Tolerances { pointwise: 1e-10, quadrature: 1e-6 },
    }
}

// ---------------------------------------------------------------------------
// sample sets

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Low-discrepancy points in the model's chart, with the chart origin (or
/// its analogue) forced in. `seed` offsets the Halton stream.
pub fn sample_points(m: &ModelSpace, count: usize, seed: u64) -> Vec<ChartPoint> {
    let start = 11 + (seed % 1000) * 97;
    let mut pts = Vec::with_capacity(count);
    let mut i = 0u64;
    while pts.len() < count {
        let u = halton(start + i, 2);
        let v = halton(start + i, 3);
        i += 1;
        let p = match m.kind() {
            ModelKind::Sphere { .. } => {
                // disk of chart radius 2 around the origin
                let r = 2.0 * u.sqrt();
                let th = std::f64::consts::TAU * v;
                ChartPoint::main(Complex64::from_polar(r, th))
            }
            ModelKind::Plane { hbar } => {
                let r = (1.0 + hbar.sqrt()) * u.sqrt();
                let th = std::f64::consts::TAU * v;
                ChartPoint::main(Complex64::from_polar(r, th))
            }
            ModelKind::HalfPlane { .. } => {
                ChartPoint::main_xy(3.0 * u - 1.5, 0.3 + 2.2 * v)
            }
            ModelKind::Podles { .. } | ModelKind::QuarticLeaf { .. } => {
                // annulus bounded away from the excluded origin
                let r = 0.4 + 1.2 * u;
                let th = std::f64::consts::TAU * v;
                ChartPoint::main(Complex64::from_polar(r, th))
            }
        };
        pts.push(p);
    }
    // Force a central anchor point.
    let anchor = match m.kind() {
        ModelKind::HalfPlane { .. } => ChartPoint::main_xy(0.0, 1.0),
        ModelKind::Podles { .. } | ModelKind::QuarticLeaf { .. } => ChartPoint::main_xy(0.8, 0.0),
        _ => ChartPoint::main_xy(0.0, 0.0),
    };
    pts[0] = anchor;
    pts
}

/// Pairs for convolution checks: Halton pairs plus forced near-diagonal
/// pairs at separations 1e-2 and 1e-1.
pub fn sample_pairs(m: &ModelSpace, count: usize, seed: u64) -> Vec<(ChartPoint, ChartPoint)> {
    let pts = sample_points(m, count + 2, seed);
    let mut pairs: Vec<(ChartPoint, ChartPoint)> = Vec::with_capacity(count + 2);
    for i in 0..count {
        pairs.push((pts[i], pts[(i + 3) % pts.len()]));
    }
    for eps in [1e-2, 1e-1] {
        let base = pts[1];
        pairs.push((base, ChartPoint { chart: base.chart, z: base.z + Complex64::new(eps, 0.5 * eps) }));
    }
    pairs
}

// ---------------------------------------------------------------------------
// calibration

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationOutcome {
    /// Multiplier applied on top of the incoming measure.
    pub c: f64,
    /// (max I - min I) / mean I over the samples.
    pub spread: f64,
    pub per_sample: Vec<f64>,
    pub quad_err: f64,
    pub tail: f64,
}

/// Rescales the measure so that |W(x, .)|^2 integrates to 1: the
/// probability-density property forced by conditions 1, 3 and 5.
pub fn calibrate_measure(
    m: &ModelSpace,
    samples: &[ChartPoint],
    tol: f64,
) -> Result<(ModelSpace, CalibrationOutcome)> {
    if samples.len() < 5 {
        return Err(CsqError::Param(format!(
            "calibration needs at least 5 well-spread samples, got {}",
            samples.len()
        )));
    }
    let integrals: Vec<_> = samples
        .par_iter()
        .map(|&x| m.probability_integral(x, tol))
        .collect::<Result<Vec<_>>>()?;
    let per_sample: Vec<f64> = integrals.iter().map(|q| q.value.re).collect();
    let quad_err = integrals.iter().map(|q| q.err).fold(0.0, f64::max);
    let tail = integrals.iter().map(|q| q.tail).fold(0.0, f64::max);
    let mean = per_sample.iter().sum::<f64>() / per_sample.len() as f64;
    let max = per_sample.iter().cloned().fold(f64::MIN, f64::max);
    let min = per_sample.iter().cloned().fold(f64::MAX, f64::min);
    let spread = (max - min) / mean;
    let limit = 1e-4;
    if !(spread.abs() <= limit) {
        return Err(CsqError::CalibrationRejected { spread, limit });
    }
    let c = 1.0 / mean;
    let outcome = CalibrationOutcome { c, spread, per_sample, quad_err, tail };
    Ok((m.with_calibration(m.calibration() * c), outcome))
}

// ---------------------------------------------------------------------------
// pointwise axioms

#[derive(Debug, Clone, Serialize)]
pub struct PointwiseReport {
    /// sup |W(x,x) - 1| over samples (condition 1).
    pub diagonal_residual: f64,
    /// max off-diagonal weighted modulus and the margin to 1 (condition 2).
    pub max_offdiag_modulus: f64,
    /// sup |W(x,y) - conj(W(y,x))| (condition 3).
    pub hermiticity_residual: f64,
    /// per-sample condition-5 mass integrals, None where quadrature failed
    /// to converge (divergent or out of budget).
    pub mass_integrals: Vec<Option<f64>>,
    /// sup over converged samples.
    pub mass_sup: Option<f64>,
    pub mass_all_finite: bool,
}

pub fn check_pointwise_axioms(
    m: &ModelSpace,
    samples: &[ChartPoint],
    quad_tol: f64,
) -> Result<PointwiseReport> {
    let mut diagonal_residual = 0.0f64;
    let mut max_offdiag: f64 = 0.0;
    let mut herm = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let wxx = m.weighted_value(x, x)?;
        diagonal_residual = diagonal_residual.max((wxx - Complex64::new(1.0, 0.0)).norm());
        for &y in samples.iter().skip(i + 1) {
            let wxy = m.weighted_value(x, y)?;
            let wyx = m.weighted_value(y, x)?;
            herm = herm.max((wxy - wyx.conj()).norm());
            max_offdiag = max_offdiag.max(wxy.norm());
        }
    }
    let masses: Vec<Option<f64>> = samples
        .par_iter()
        .map(|&x| m.abs_integral(x, quad_tol).ok().map(|q| q.value.re))
        .collect();
    let converged: Vec<f64> = masses.iter().flatten().cloned().collect();
    let mass_sup = converged.iter().cloned().fold(None, |acc: Option<f64>, v| {
        Some(acc.map_or(v, |a| a.max(v)))
    });
    Ok(PointwiseReport {
        diagonal_residual,
        max_offdiag_modulus: max_offdiag,
        hermiticity_residual: herm,
        mass_all_finite: masses.iter().all(|v| v.is_some()),
        mass_integrals: masses,
        mass_sup,
    })
}

// ---------------------------------------------------------------------------
// idempotence

#[derive(Debug, Clone, Serialize)]
pub struct PairResidual {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub residual: f64,
    pub quad_err: f64,
    pub tail: f64,
}

/// Condition 4: |(W * W)(x,y) - W(x,y)| per pair, in the weighted gauge.
pub fn check_idempotent(
    m: &ModelSpace,
    pairs: &[(ChartPoint, ChartPoint)],
    tol: f64,
) -> Result<Vec<PairResidual>> {
    pairs
        .par_iter()
        .map(|&(x, y)| {
            let conv = m.convolution(x, y, tol).map_err(|e| {
                CsqError::Param(format!(
                    "idempotence quadrature failed at pair ({}, {}) / ({}, {}): {e}",
                    x.z.re, x.z.im, y.z.re, y.z.im
                ))
            })?;
            let w = m.weighted_value(x, y)?;
            Ok(PairResidual {
                x: [x.z.re, x.z.im],
                y: [y.z.re, y.z.im],
                residual: (conv.value - w).norm(),
                quad_err: conv.err,
                tail: conv.tail,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// isometry invariance

#[derive(Debug, Clone, Serialize)]
pub struct TripleResidual {
    pub delta_class_residual: f64,
    pub modulus_residual: f64,
}

/// Invariance of the normalized 3-point class and of |W|^2 under an
/// orientation-preserving isometry.
pub fn check_isometry_invariance(
    m: &ModelSpace,
    g: &Isometry,
    triples: &[(ChartPoint, ChartPoint, ChartPoint)],
) -> Result<Vec<TripleResidual>> {
    triples
        .iter()
        .map(|&(x, y, z)| {
            let gx = m.isometry_act(g, x)?;
            let gy = m.isometry_act(g, y)?;
            let gz = m.isometry_act(g, z)?;
            let dc = normalized_delta(m, x, y, z)?;
            let dcg = normalized_delta(m, gx, gy, gz)?;
            let w = m.weighted_modulus(x, y)?.powi(2);
            let wg = m.weighted_modulus(gx, gy)?.powi(2);
            Ok(TripleResidual {
                delta_class_residual: (dcg - dc).norm(),
                modulus_residual: (wg - w).abs(),
            })
        })
        .collect()
}

/// [Delta](x,y,z) = Delta(x,y,z) / Delta(x,x,z).
pub fn normalized_delta(
    m: &ModelSpace,
    x: ChartPoint,
    y: ChartPoint,
    z: ChartPoint,
) -> Result<Complex64> {
    let d = m.delta(x, y, z)?;
    let wxz = m.weighted_modulus(x, z)?;
    Ok(d / (wxz * wxz))
}

// ---------------------------------------------------------------------------
// cocycle trivialization

#[derive(Debug, Clone, Serialize)]
pub struct CocycleResidual {
    pub residual: Option<f64>,
    /// Pair skipped because W(x,y) is too close to the zero set.
    pub skipped: bool,
}

/// The twisted convolution of the constant 1 against [Delta] returns 1:
/// int Delta(x,w,y) dmu(w) / |W(x,y)|^2 = (W*W)(x,y)/W(x,y).
pub fn check_cocycle_trivialization(
    m: &ModelSpace,
    pairs: &[(ChartPoint, ChartPoint)],
    tol: f64,
) -> Result<Vec<CocycleResidual>> {
    pairs
        .par_iter()
        .map(|&(x, y)| {
            let w = m.weighted_value(x, y)?;
            if w.norm() < 1e-3 {
                return Ok(CocycleResidual { residual: None, skipped: true });
            }
            let conv = m.convolution(x, y, tol)?;
            let ratio = conv.value / w;
            Ok(CocycleResidual {
                residual: Some((ratio - Complex64::new(1.0, 0.0)).norm()),
                skipped: false,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// suite report

/// One named check with its worst residual and the tolerance it was held to.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomStatus {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

/// Structured outcome of the full verification suite for one model.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub model: String,
    pub calibration: f64,
    pub calibration_spread: f64,
    pub sample_count: usize,
    pub pair_count: usize,
    pub seed: u64,
    pub statuses: Vec<AxiomStatus>,
    pub max_quad_err: f64,
    pub max_tail: f64,
    pub pass: bool,
}

pub struct SuiteOptions {
    pub samples: usize,
    pub pairs: usize,
    pub seed: u64,
    pub tolerances: Option<Tolerances>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { samples: 8, pairs: 12, seed: 0, tolerances: None }
    }
}

pub fn model_label(kind: &ModelKind) -> String {
    match kind {
        ModelKind::Sphere { n } => format!("sphere(n={n})"),
        ModelKind::Plane { hbar } => format!("plane(hbar={hbar})"),
        ModelKind::HalfPlane { k } => format!("halfplane(k={k})"),
        ModelKind::Podles { hbar, .. } => format!("podles(hbar={hbar})"),
        ModelKind::QuarticLeaf { hbar } => format!("quartic-leaf(hbar={hbar})"),
    }
}

/// Calibrate, then run every axiom check; failures become report rows.
pub fn run_axiom_suite(m: &ModelSpace, opts: &SuiteOptions) -> Result<AxiomReport> {
    let tols = opts.tolerances.unwrap_or_else(|| default_tolerances(m.kind()));
    let samples = sample_points(m, opts.samples, opts.seed);
    let (cal_model, cal) = calibrate_measure(m, &samples, tols.quadrature * 1e-2)?;
    let pairs = sample_pairs(&cal_model, opts.pairs, opts.seed);

    let mut statuses = Vec::new();
    let mut max_quad_err = cal.quad_err;
    let mut max_tail = cal.tail;

    statuses.push(AxiomStatus {
        name: "calibration-spread".into(),
        passed: cal.spread.abs() < 1e-4,
        residual: cal.spread.abs(),
        tolerance: 1e-4,
    });

    let pw = check_pointwise_axioms(&cal_model, &samples, tols.quadrature)?;
    statuses.push(AxiomStatus {
        name: "condition-1-unit-diagonal".into(),
        passed: pw.diagonal_residual < tols.pointwise,
        residual: pw.diagonal_residual,
        tolerance: tols.pointwise,
    });
    statuses.push(AxiomStatus {
        name: "condition-2-offdiagonal-contraction".into(),
        passed: pw.max_offdiag_modulus < 1.0,
        residual: pw.max_offdiag_modulus,
        tolerance: 1.0,
    });
    statuses.push(AxiomStatus {
        name: "condition-3-hermiticity".into(),
        passed: pw.hermiticity_residual < tols.pointwise,
        residual: pw.hermiticity_residual,
        tolerance: tols.pointwise,
    });
    statuses.push(AxiomStatus {
        name: "condition-5-finite-mass".into(),
        passed: pw.mass_all_finite,
        residual: pw.mass_sup.unwrap_or(f64::INFINITY),
        tolerance: f64::INFINITY,
    });

    let idem = check_idempotent(&cal_model, &pairs, tols.quadrature * 1e-2)?;
    let worst = idem.iter().map(|r| r.residual).fold(0.0, f64::max);
    max_quad_err = idem.iter().map(|r| r.quad_err).fold(max_quad_err, f64::max);
    max_tail = idem.iter().map(|r| r.tail).fold(max_tail, f64::max);
    statuses.push(AxiomStatus {
        name: "condition-4-idempotence".into(),
        passed: worst < tols.quadrature,
        residual: worst,
        tolerance: tols.quadrature,
    });

    let coc = check_cocycle_trivialization(&cal_model, &pairs, tols.quadrature * 1e-2)?;
    let worst = coc.iter().filter_map(|r| r.residual).fold(0.0, f64::max);
    statuses.push(AxiomStatus {
        name: "cocycle-trivialization".into(),
        passed: worst < tols.quadrature * 10.0,
        residual: worst,
        tolerance: tols.quadrature * 10.0,
    });

    // Isometry invariance where the model has a distinguished group.
    let iso: Option<Isometry> = match m.kind() {
        ModelKind::Plane { .. } => Some(Isometry::PlaneMotion {
            angle: 0.7,
            translation: Complex64::new(0.3, -0.4),
        }),
        ModelKind::HalfPlane { .. } => Some(Isometry::mobius_real([[0.0, -1.0], [1.0, 0.0]])?),
        _ => None,
    };
    if let Some(g) = iso {
        let pts = sample_points(&cal_model, 6, opts.seed + 1);
        let triples: Vec<_> = (0..pts.len() - 2).map(|i| (pts[i], pts[i + 1], pts[i + 2])).collect();
        let res = check_isometry_invariance(&cal_model, &g, &triples)?;
        let worst = res
            .iter()
            .map(|r| r.delta_class_residual.max(r.modulus_residual))
            .fold(0.0, f64::max);
        statuses.push(AxiomStatus {
            name: "isometry-invariance".into(),
            passed: worst < 1e-10,
            residual: worst,
            tolerance: 1e-10,
        });
    }

    let pass = statuses.iter().all(|s| s.passed);
    Ok(AxiomReport {
        model: model_label(m.kind()),
        calibration: cal_model.calibration(),
        calibration_spread: cal.spread,
        sample_count: samples.len(),
        pair_count: pairs.len(),
        seed: opts.seed,
        statuses,
        max_quad_err,
        max_tail,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_constants() {
        // Sphere: c = 1 under the fixed convention.
        let m = ModelSpace::sphere(4).unwrap();
        let samples = sample_points(&m, 6, 0);
        let (_, out) = calibrate_measure(&m, &samples, 1e-10).unwrap();
        assert!((out.c - 1.0).abs() < 1e-8, "sphere c = {}", out.c);
        assert!(out.spread.abs() < 1e-8);

        // Plane hbar=1: c = 2 (Gaussian oracle).
        let m = ModelSpace::plane(1.0).unwrap();
        let samples = sample_points(&m, 6, 0);
        let (_, out) = calibrate_measure(&m, &samples, 1e-10).unwrap();
        assert!((out.c - 2.0).abs() < 1e-8, "plane c = {}", out.c);

        // Half-plane k: c = (k-1)/k (Beta oracle).
        let m = ModelSpace::half_plane(4).unwrap();
        let samples = sample_points(&m, 6, 0);
        let (_, out) = calibrate_measure(&m, &samples, 1e-9).unwrap();
        assert!((out.c - 0.75).abs() < 1e-7, "halfplane c = {}", out.c);
    }

    #[test]
    fn calibration_needs_samples_and_positive_integrals() {
        let m = ModelSpace::sphere(2).unwrap();
        let few = sample_points(&m, 3, 0);
        assert!(calibrate_measure(&m, &few, 1e-8).is_err());
        let samples = sample_points(&m, 5, 0);
        let (_, out) = calibrate_measure(&m, &samples, 1e-8).unwrap();
        assert!(out.per_sample.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn doubling_measure_halves_calibration() {
        let m = ModelSpace::plane(0.5).unwrap();
        let samples = sample_points(&m, 5, 0);
        let (_, out1) = calibrate_measure(&m, &samples, 1e-9).unwrap();
        let doubled = m.with_calibration(2.0);
        let (_, out2) = calibrate_measure(&doubled, &samples, 1e-9).unwrap();
        assert!((out2.c - 0.5 * out1.c).abs() < 1e-8 * out1.c);
    }

    #[test]
    fn idempotence_diagonal_and_sphere_pairs() {
        let m = ModelSpace::sphere(3).unwrap();
        let samples = sample_points(&m, 6, 0);
        let (cal, _) = calibrate_measure(&m, &samples, 1e-10).unwrap();
        // Diagonal pair: (W*W)(x,x) = 1 by the calibration definition.
        let x = samples[2];
        let res = check_idempotent(&cal, &[(x, x)], 1e-10).unwrap();
        assert!(res[0].residual < 1e-8, "{}", res[0].residual);
        // Off-diagonal: finite-rank kernel identity B*B = B.
        let pairs = sample_pairs(&cal, 8, 7);
        let res = check_idempotent(&cal, &pairs, 1e-10).unwrap();
        let worst = res.iter().map(|r| r.residual).fold(0.0, f64::max);
        assert!(worst < 1e-8, "sup residual {worst}");
    }

    #[test]
    fn idempotence_plane_with_certified_tail() {
        let m = ModelSpace::plane(1.0).unwrap();
        let samples = sample_points(&m, 5, 0);
        let (cal, _) = calibrate_measure(&m, &samples, 1e-9).unwrap();
        let pairs = sample_pairs(&cal, 6, 1);
        let res = check_idempotent(&cal, &pairs, 1e-9).unwrap();
        for r in &res {
            assert!(r.residual < 1e-6, "residual {}", r.residual);
            assert!(r.tail < 1e-10, "tail {}", r.tail);
        }
    }

    #[test]
    fn triple_convolution_is_as_good_as_single() {
        // Iterating the convolution twice changes nothing beyond twice the
        // single-convolution residual bound.
        let m = ModelSpace::sphere(2).unwrap();
        let samples = sample_points(&m, 5, 0);
        let (cal, _) = calibrate_measure(&m, &samples, 1e-10).unwrap();
        let (x, y) = (samples[1], samples[3]);
        let single = (cal.convolution(x, y, 1e-10).unwrap().value
            - cal.weighted_value(x, y).unwrap())
        .norm();
        let triple = (cal.triple_convolution(x, y, 1e-8).unwrap().value
            - cal.weighted_value(x, y).unwrap())
        .norm();
        assert!(triple <= 2.0 * single.max(1e-9), "triple {triple} vs single {single}");

        let m = ModelSpace::plane(0.8).unwrap();
        let samples = sample_points(&m, 5, 0);
        let (cal, _) = calibrate_measure(&m, &samples, 1e-9).unwrap();
        let (x, y) = (samples[1], samples[2]);
        let w = cal.weighted_value(x, y).unwrap();
        let single = (cal.convolution(x, y, 1e-9).unwrap().value - w).norm();
        let triple = (cal.triple_convolution(x, y, 1e-7).unwrap().value - w).norm();
        assert!(triple <= 2.0 * single.max(1e-6), "triple {triple} vs single {single}");

        let m = ModelSpace::quartic_leaf(0.4).unwrap();
        let samples = sample_points(&m, 5, 0);
        let (cal, _) = calibrate_measure(&m, &samples, 1e-9).unwrap();
        let (x, y) = (samples[1], samples[2]);
        let w = cal.weighted_value(x, y).unwrap();
        let single = (cal.convolution(x, y, 1e-9).unwrap().value - w).norm();
        let triple = (cal.triple_convolution(x, y, 1e-6).unwrap().value - w).norm();
        assert!(triple <= 2.0 * single.max(1e-5), "quartic triple {triple} vs single {single}");
    }

    #[test]
    fn pointwise_suite_all_models_small() {
        for m in [
            ModelSpace::sphere(2).unwrap(),
            ModelSpace::plane(0.6).unwrap(),
            ModelSpace::half_plane(3).unwrap(),
        ] {
            let samples = sample_points(&m, 6, 0);
            let pw = check_pointwise_axioms(&m, &samples, 1e-6).unwrap();
            assert!(pw.diagonal_residual < 1e-12);
            assert!(pw.max_offdiag_modulus < 1.0);
            assert!(pw.hermiticity_residual < 1e-12);
            assert!(pw.mass_all_finite, "{:?}", m.kind());
        }
    }

    #[test]
    fn halfplane_mass_diverges_at_k2() {
        // Condition 5 genuinely fails for k = 2: the kernel decays like the
        // reciprocal hyperbolic volume growth. The check must report it as a
        // non-converged entry rather than a silent number.
        let m = ModelSpace::half_plane(2).unwrap();
        let samples = vec![ChartPoint::main_xy(0.0, 1.0)];
        let pw = check_pointwise_axioms(&m, &samples, 1e-6).unwrap();
        assert!(!pw.mass_all_finite);
    }

    #[test]
    fn isometry_invariance_residuals() {
        // Identity isometry: residual 0.
        let m = ModelSpace::plane(1.0).unwrap();
        let pts = sample_points(&m, 5, 0);
        let triples = vec![(pts[0], pts[1], pts[2]), (pts[1], pts[3], pts[4])];
        let id = Isometry::PlaneMotion { angle: 0.0, translation: Complex64::new(0.0, 0.0) };
        let res = check_isometry_invariance(&m, &id, &triples).unwrap();
        assert!(res.iter().all(|r| r.delta_class_residual == 0.0 && r.modulus_residual == 0.0));

        // Plane translation: exponent depends on differences only.
        let g = Isometry::PlaneMotion { angle: 0.0, translation: Complex64::new(0.7, -1.1) };
        let res = check_isometry_invariance(&m, &g, &triples).unwrap();
        for r in &res {
            assert!(r.delta_class_residual < 1e-12);
            assert!(r.modulus_residual < 1e-12);
        }

        // Half-plane inversion, k = 4.
        let m = ModelSpace::half_plane(4).unwrap();
        let pts = sample_points(&m, 6, 3);
        let triples: Vec<_> = (0..4).map(|i| (pts[i], pts[i + 1], pts[i + 2])).collect();
        let g = Isometry::mobius_real([[0.0, -1.0], [1.0, 0.0]]).unwrap();
        let res = check_isometry_invariance(&m, &g, &triples).unwrap();
        for r in &res {
            assert!(r.delta_class_residual < 1e-10, "{}", r.delta_class_residual);
            assert!(r.modulus_residual < 1e-10, "{}", r.modulus_residual);
        }
    }

    #[test]
    fn cocycle_trivialization_plane_and_sphere() {
        let m = ModelSpace::plane(1.0).unwrap();
        let samples = sample_points(&m, 5, 0);
        let (cal, _) = calibrate_measure(&m, &samples, 1e-9).unwrap();
        let pairs = sample_pairs(&cal, 6, 0);
        let res = check_cocycle_trivialization(&cal, &pairs, 1e-9).unwrap();
        let worst = res.iter().filter_map(|r| r.residual).fold(0.0, f64::max);
        assert!(worst < 1e-6, "plane cocycle {worst}");

        let m = ModelSpace::sphere(2).unwrap();
        let samples = sample_points(&m, 5, 0);
        let (cal, _) = calibrate_measure(&m, &samples, 1e-10).unwrap();
        // Keep pairs with |W| > 0.1 (x = y included: reduces to calibration).
        let pairs: Vec<_> = sample_pairs(&cal, 8, 0)
            .into_iter()
            .filter(|&(x, y)| cal.weighted_modulus(x, y).unwrap() > 0.1)
            .collect();
        assert!(!pairs.is_empty());
        let res = check_cocycle_trivialization(&cal, &pairs, 1e-10).unwrap();
        let worst = res.iter().filter_map(|r| r.residual).fold(0.0, f64::max);
        assert!(worst < 1e-7, "sphere cocycle {worst}");
    }

    #[test]
    fn suite_report_deterministic() {
        let m = ModelSpace::sphere(2).unwrap();
        let opts = SuiteOptions { samples: 5, pairs: 4, seed: 42, tolerances: None };
        let a = run_axiom_suite(&m, &opts).unwrap();
        let b = run_axiom_suite(&m, &opts).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
        assert!(a.pass);
    }

    #[test]
    fn suite_report_independent_of_thread_count() {
        // The quadrature reduction is ordered, so residuals are bit-stable
        // across worker counts.
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let m = ModelSpace::plane(0.9).unwrap();
                let opts = SuiteOptions { samples: 5, pairs: 4, seed: 3, tolerances: None };
                serde_json::to_string(&run_axiom_suite(&m, &opts).unwrap()).unwrap()
            })
        };
        assert_eq!(run(1), run(4));
    }
}
