//! The suite drivers behind each subcommand.

use num_complex::Complex64;
use serde_json::json;

use csq::axioms::{self, SuiteOptions, Tolerances};
use csq::chern;
use csq::error::CsqError;
use csq::models::{ChartPoint, ModelSpace};
use csq::numerics::TriangleMesh;
use csq::pathint::{self, PathSpec};
use csq::quantize;
use csq::report::{csv_table, Report, SuiteReport};
use csq::starprod::{self, SpherePoly, QC};

use crate::config::Resolved;

pub enum CmdError {
    Usage(String),
    Internal(CsqError),
}

impl From<CsqError> for CmdError {
    fn from(e: CsqError) -> Self {
        match e {
            CsqError::Param(_) => CmdError::Usage(e.to_string()),
            other => CmdError::Internal(other),
        }
    }
}

type CmdResult = Result<(Report, Vec<(String, String)>), CmdError>;

fn build_model(cfg: &Resolved) -> Result<ModelSpace, CmdError> {
    let m = match cfg.model.as_str() {
        "sphere" => ModelSpace::sphere(cfg.n),
        "plane" => ModelSpace::plane(cfg.hbar),
        "halfplane" => ModelSpace::half_plane(cfg.k),
        "podles" => ModelSpace::podles(cfg.hbar),
        "quartic" => ModelSpace::quartic_leaf(cfg.hbar),
        other => return Err(CmdError::Usage(format!("unknown model '{other}'"))),
    };
    m.map_err(|e| CmdError::Usage(e.to_string()))
}

fn sphere_samples(count: usize) -> Vec<[f64; 3]> {
    (0..count)
        .map(|i| {
            let z = -0.9 + 1.8 * (i as f64 + 0.5) / count as f64;
            let phi = 2.399963 * i as f64;
            let r = (1.0 - z * z).sqrt();
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// `verify`: calibrate the model and run the full axiom suite.
pub fn cmd_verify(cfg: &Resolved) -> CmdResult {
    let model = build_model(cfg)?;
    let tolerances = if cfg.tol > 0.0 {
        Some(Tolerances { pointwise: 1e-10, quadrature: cfg.tol })
    } else {
        None
    };
    let opts = SuiteOptions { samples: cfg.samples, pairs: cfg.samples + 4, seed: cfg.seed, tolerances };
    let report = axioms::run_axiom_suite(&model, &opts).map_err(CmdError::Internal)?;
    let rows: Vec<Vec<f64>> = report
        .statuses
        .iter()
        .map(|s| vec![if s.passed { 1.0 } else { 0.0 }, s.residual, s.tolerance])
        .collect();
    let csv = csv_table(&["passed", "residual", "tolerance"], &rows);
    let mut suite = SuiteReport::new("axioms", report.pass);
    suite.residuals = serde_json::to_value(&report).unwrap();
    suite.tables = json!({ "statuses_csv": csv });
    Ok((
        Report::new(cfg.to_json(), vec![suite]),
        vec![("statuses".into(), csv_table(&["passed", "residual", "tolerance"], &rows))],
    ))
}

/// `quantize`: Gram matrix, resolution of identity, round trip, Schur check
/// and the Berezin-transform table.
pub fn cmd_quantize(cfg: &Resolved) -> CmdResult {
    if cfg.model != "sphere" {
        return Err(CmdError::Usage("quantize runs on the sphere model".into()));
    }
    let model = build_model(cfg)?;
    let tol = if cfg.tol > 0.0 { cfg.tol } else { 1e-9 };
    let mut suites = Vec::new();

    let g = quantize::gram_matrix(&model, tol).map_err(CmdError::Internal)?;
    let dim = (cfg.n + 1) as usize;
    let gram_residual = quantize::dense::max_abs_diff(&g, &quantize::dense::identity(dim));
    let mut s = SuiteReport::new("gram", gram_residual < 1e-8);
    s.residuals = json!({ "identity_residual": gram_residual });
    suites.push(s);

    let (res, trace) = quantize::resolution_of_identity(&model, tol).map_err(CmdError::Internal)?;
    let mut s = SuiteReport::new("resolution", res < 1e-8 && (trace - dim as f64).abs() < 1e-7);
    s.residuals = json!({ "identity_residual": res, "trace": trace, "dim": dim });
    suites.push(s);

    let pts = axioms::sample_points(&model, 12, cfg.seed);
    let pairs: Vec<_> = (0..10).map(|i| (pts[i], pts[(i + 3) % pts.len()])).collect();
    let triples: Vec<_> = (0..10).map(|i| (pts[i], pts[(i + 1) % pts.len()], pts[(i + 5) % pts.len()])).collect();
    let rt = quantize::reconstruct_propagator(&model, &pairs, &triples).map_err(CmdError::Internal)?;
    let mut s = SuiteReport::new("roundtrip", rt.modulus_sup < 1e-10 && rt.delta_sup < 1e-10);
    s.residuals = serde_json::to_value(&rt).unwrap();
    suites.push(s);

    let schur = quantize::su2::su2_schur_check(cfg.n).map_err(CmdError::Internal)?;
    let ok = schur.identity_residual < 1e-8
        && schur.commutator_residual < 1e-8
        && schur.match_residual < 1e-8;
    let mut s = SuiteReport::new("su2-schur", ok);
    s.residuals = serde_json::to_value(&schur).unwrap();
    suites.push(s);

    let levels: Vec<u32> = cfg.levels.iter().map(|&l| l as u32).collect();
    let samples = sphere_samples(cfg.samples.max(20));
    let table = quantize::berezin_transform_limit(&|v| v[2], &levels, &samples, tol)
        .map_err(CmdError::Internal)?;
    let rows: Vec<Vec<f64>> = table.iter().map(|&(n, e)| vec![n as f64, e]).collect();
    let monotone = table.windows(2).all(|w| w[1].1 < w[0].1);
    let csv = csv_table(&["n", "sup_error"], &rows);
    let mut s = SuiteReport::new("berezin", monotone);
    s.tables = json!({ "berezin_csv": csv });
    suites.push(s);

    Ok((
        Report::new(cfg.to_json(), suites),
        vec![("berezin".into(), csv_table(&["n", "sup_error"], &rows))],
    ))
}

/// `star`: exact product identities, the Pauli correspondence, and the
/// semiclassical error table.
pub fn cmd_star(cfg: &Resolved) -> CmdResult {
    let mut suites = Vec::new();
    let mut tables = Vec::new();
    let which = cfg.check.as_str();
    if !matches!(which, "pauli" | "identities" | "semiclassical" | "all") {
        return Err(CmdError::Usage(format!("unknown star check '{which}'")));
    }

    if matches!(which, "pauli" | "all") {
        // sigma_z carries x3 exactly; the ladder matrices carry
        // (x1 +- i x2)/2, so their doubles match the coordinates.
        let m = ModelSpace::sphere(1).map_err(CmdError::Internal)?;
        let ax3 = starprod::poly_to_coeff(&SpherePoly::x3(), 1).map_err(CmdError::Internal)?;
        let exact_sz = *ax3.at(0, 0) == QC::from_int(-1) && *ax3.at(1, 1) == QC::from_int(1);
        let plus = SpherePoly::x1().add(&SpherePoly::x2().scale(&QC::i()));
        let ap = starprod::poly_to_coeff(&plus, 1).map_err(CmdError::Internal)?;
        let exact_sp = *ap.at(1, 0) == QC::from_int(2);
        let mut sup = 0.0f64;
        for p in sphere_samples(50) {
            let sym_z = quantize::covariant_symbol(
                &m,
                &quantize::QuantOperator::new(ax3.to_operator_matrix(), "sz"),
            )
            .map_err(CmdError::Internal)?;
            let sym_p = quantize::covariant_symbol(
                &m,
                &quantize::QuantOperator::new(ap.to_operator_matrix(), "2s+"),
            )
            .map_err(CmdError::Internal)?;
            sup = sup.max((sym_z.eval_xyz(p) - Complex64::new(p[2], 0.0)).norm());
            sup = sup.max((sym_p.eval_xyz(p) - Complex64::new(p[0], p[1])).norm());
        }
        let mut s = SuiteReport::new("pauli", exact_sz && exact_sp && sup < 1e-10);
        s.residuals = json!({ "symbol_sup_residual": sup, "exact_entries": exact_sz && exact_sp });
        suites.push(s);
    }

    if matches!(which, "identities" | "all") {
        let mut all_ok = true;
        for n in [1u32, 2, 4] {
            for i in 1..=3usize {
                let j = i % 3 + 1;
                let k = (i + 1) % 3 + 1;
                let xi = SpherePoly::coordinate(i);
                let lhs = starprod::star(
                    &starprod::poly_to_coeff(&xi, n).map_err(CmdError::Internal)?,
                    &starprod::poly_to_coeff(&xi, n).map_err(CmdError::Internal)?,
                )
                .map_err(CmdError::Internal)?;
                let rhs = xi.mul(&xi).add(
                    &SpherePoly::coordinate(j)
                        .mul(&SpherePoly::coordinate(j))
                        .add(&SpherePoly::coordinate(k).mul(&SpherePoly::coordinate(k)))
                        .scale(&QC::from_ratio(1, n as i64)),
                );
                all_ok &= lhs == starprod::poly_to_coeff(&rhs, n).map_err(CmdError::Internal)?;
            }
        }
        let mut s = SuiteReport::new("exact-identities", all_ok);
        s.residuals = json!({ "exact": all_ok });
        suites.push(s);
    }

    if matches!(which, "semiclassical" | "all") {
        let samples = sphere_samples(60);
        let p = SpherePoly::x1().mul(&SpherePoly::x1());
        let q = SpherePoly::x2().mul(&SpherePoly::x2());
        let levels: Vec<u32> = cfg.levels.iter().map(|&l| l as u32).collect();
        let rows = starprod::semiclassical_check(&p, &q, &levels, &samples)
            .map_err(CmdError::Internal)?;
        let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.n as f64, r.error]).collect();
        let ratios_ok = rows
            .windows(2)
            .all(|w| (0.15..=0.35).contains(&(w[1].error / w[0].error)));
        let csv = csv_table(&["n", "error"], &table);
        let mut s = SuiteReport::new("semiclassical", ratios_ok);
        s.tables = json!({ "semiclassical_csv": csv });
        suites.push(s);
        tables.push(("semiclassical".to_string(), csv_table(&["n", "error"], &table)));
    }

    Ok((Report::new(cfg.to_json(), suites), tables))
}

/// `chern`: mesh Chern numbers over icosphere levels with an orientation
/// reversal check.
pub fn cmd_chern(cfg: &Resolved) -> CmdResult {
    if cfg.model != "sphere" {
        return Err(CmdError::Usage("chern runs on the sphere model".into()));
    }
    let model = build_model(cfg)?;
    if cfg.mesh < 2 {
        return Err(CmdError::Usage("chern needs --mesh >= 2".into()));
    }
    let mut rows = Vec::new();
    let mut all_match = true;
    for level in 2..=cfg.mesh {
        let mesh = TriangleMesh::icosphere(level);
        let out = chern::chern_number(&model, &mesh).map_err(CmdError::Internal)?;
        all_match &= out.chern_number == cfg.n as i64 && out.residual < 1e-9;
        rows.push(vec![level as f64, out.chern_number as f64, out.residual, out.max_face_phase]);
    }
    let rev = chern::chern_number(&model, &TriangleMesh::icosphere(cfg.mesh).reversed())
        .map_err(CmdError::Internal)?;
    all_match &= rev.chern_number == -(cfg.n as i64);
    let csv = csv_table(&["mesh_level", "chern", "residual", "max_face_phase"], &rows);
    let mut s = SuiteReport::new("chern", all_match);
    s.residuals = json!({ "reversed_chern": rev.chern_number });
    s.tables = json!({ "convergence_csv": csv });
    Ok((
        Report::new(cfg.to_json(), vec![s]),
        vec![(
            "convergence".into(),
            csv_table(&["mesh_level", "chern", "residual", "max_face_phase"], &rows),
        )],
    ))
}

fn parse_loop(spec: &str) -> Result<PathSpec, CmdError> {
    let mut parts = spec.split(':');
    match (parts.next(), parts.next()) {
        (Some("latitude"), Some(r)) => {
            let radius: f64 = r
                .parse()
                .map_err(|_| CmdError::Usage(format!("bad latitude radius '{r}'")))?;
            Ok(PathSpec::Latitude { radius })
        }
        (Some("circle"), Some(rest)) => {
            let nums: Vec<f64> = rest
                .split(',')
                .map(|s| s.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CmdError::Usage(format!("bad circle spec '{rest}'")))?;
            if nums.len() != 3 {
                return Err(CmdError::Usage("circle spec is cx,cy,r".into()));
            }
            Ok(PathSpec::Circle { center: Complex64::new(nums[0], nums[1]), radius: nums[2] })
        }
        _ => Err(CmdError::Usage(format!("unknown loop spec '{spec}'"))),
    }
}

/// `slice`: sliced-product convergence against the connection holonomy,
/// plus the cylinder-function two-path check.
pub fn cmd_slice(cfg: &Resolved) -> CmdResult {
    let model = build_model(cfg)?;
    let path = parse_loop(&cfg.loop_spec)?;
    let levels: Vec<usize> = cfg.levels.iter().map(|&l| l as usize).collect();
    if levels.len() < 2 {
        return Err(CmdError::Usage("slice needs at least two partition sizes".into()));
    }
    let rows = pathint::holonomy_convergence(&model, &path, &levels).map_err(CmdError::Internal)?;
    let table: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.intervals as f64, r.phase_error, r.modulus_deficiency])
        .collect();
    let monotone = rows.windows(2).all(|w| {
        w[1].phase_error <= w[0].phase_error && w[1].modulus_deficiency <= w[0].modulus_deficiency
    });
    let csv = csv_table(&["intervals", "phase_error", "modulus_deficiency"], &table);
    let mut s = SuiteReport::new("holonomy", monotone);
    s.tables = json!({ "convergence_csv": csv });
    let mut suites = vec![s];

    if cfg.model == "sphere" {
        let x = ChartPoint::main_xy(0.25, -0.15);
        let y = ChartPoint::main_xy(-0.2, 0.35);
        let f: &(dyn Fn([f64; 3]) -> Complex64 + Sync) = &|v| Complex64::new(v[2], 0.0);
        let g: &(dyn Fn([f64; 3]) -> Complex64 + Sync) = &|v| Complex64::new(v[0], 0.0);
        let d = pathint::cylinder_consistency(&model, x, y, &[f, g], 2, 1e-10)
            .map_err(CmdError::Internal)?;
        let mut s = SuiteReport::new("cylinder", d < 1e-7);
        s.residuals = json!({ "max_discrepancy": d });
        suites.push(s);
    }

    Ok((
        Report::new(cfg.to_json(), suites),
        vec![(
            "convergence".into(),
            csv_table(&["intervals", "phase_error", "modulus_deficiency"], &table),
        )],
    ))
}

/// `podles`: coefficients, hermiticity, calibration and leaf idempotence.
pub fn cmd_podles(cfg: &Resolved) -> CmdResult {
    let model = ModelSpace::podles(cfg.hbar).map_err(|e| CmdError::Usage(e.to_string()))?;
    let data = model.podles_data().unwrap();
    let rows: Vec<Vec<f64>> = data.coeffs.iter().enumerate().map(|(i, &c)| vec![i as f64, c]).collect();
    let csv = csv_table(&["n", "c_n"], &rows);
    let mut s = SuiteReport::new("coefficients", data.coeffs.iter().all(|&c| c > 0.0));
    s.residuals = json!({ "terms": data.coeffs.len(), "truncation_bound": data.truncation_bound });
    s.tables = json!({ "coefficients_csv": csv });
    let mut suites = vec![s];

    // hermiticity is exact by construction
    let x = ChartPoint::main_xy(0.7, -0.3);
    let y = ChartPoint::main_xy(-0.4, 0.9);
    let vxy = model.weighted_value(x, y).map_err(CmdError::Internal)?;
    let vyx = model.weighted_value(y, x).map_err(CmdError::Internal)?;
    let herm = (vxy - vyx.conj()).norm();
    let mut s = SuiteReport::new("hermiticity", herm == 0.0);
    s.residuals = json!({ "residual": herm });
    suites.push(s);

    let tol = if cfg.tol > 0.0 { cfg.tol } else { 1e-6 };
    let samples = axioms::sample_points(&model, cfg.samples.max(5), cfg.seed);
    let (cal_model, cal) =
        axioms::calibrate_measure(&model, &samples, tol).map_err(CmdError::Internal)?;
    let pairs = axioms::sample_pairs(&cal_model, 8, cfg.seed);
    let idem = axioms::check_idempotent(&cal_model, &pairs, tol).map_err(CmdError::Internal)?;
    let worst = idem.iter().map(|r| r.residual).fold(0.0, f64::max);
    let tail = idem.iter().map(|r| r.tail).fold(0.0, f64::max);
    let mut s = SuiteReport::new("leaf-idempotence", worst < 1e-4);
    s.residuals = json!({
        "calibration": cal_model.calibration(),
        "calibration_spread": cal.spread,
        "sup_residual": worst,
        "certified_tail": tail,
    });
    suites.push(s);

    Ok((Report::new(cfg.to_json(), suites), vec![("coefficients".into(), csv_table(&["n", "c_n"], &rows))]))
}
