//! A short tour: calibrate a model, check the axioms, quantize, and read
//! off the Chern number.

use csq::axioms::{calibrate_measure, check_idempotent, sample_pairs, sample_points};
use csq::chern::chern_number;
use csq::models::{ChartPoint, ModelSpace};
use csq::numerics::TriangleMesh;
use csq::quantize::{build_q, covariant_symbol, resolution_of_identity};
use num_complex::Complex64;

fn main() -> csq::Result<()> {
    let n = 3;
    let m = ModelSpace::sphere(n)?;

    // The kernel at a pair of chart points.
    let x = ChartPoint::main_xy(0.0, 0.0);
    let y = ChartPoint::main_xy(0.6, -0.2);
    let s = m.eval_propagator(x, y)?;
    println!("Omega(x,y) = {}   |Omega| = {:.6}", s.value, s.weighted_modulus);

    // Calibrate the measure and verify idempotence over a few pairs.
    let samples = sample_points(&m, 6, 0);
    let (m, cal) = calibrate_measure(&m, &samples, 1e-10)?;
    println!("calibration c = {:.12} (spread {:.2e})", cal.c, cal.spread);
    let pairs = sample_pairs(&m, 6, 0);
    let worst = check_idempotent(&m, &pairs, 1e-10)?
        .iter()
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    println!("idempotence residual = {worst:.2e}");

    // Resolution of identity and a Toeplitz operator.
    let (residual, trace) = resolution_of_identity(&m, 1e-10)?;
    println!("resolution residual = {residual:.2e}, trace = {trace:.9}");
    let qf = build_q(&m, &|v| Complex64::new(v[2], 0.0), 1e-9)?;
    let sym = covariant_symbol(&m, &qf)?;
    let p = [0.6, 0.0, 0.8];
    println!(
        "Berezin transform of x3 at x3 = {}: {:.6} (limit {})",
        p[2],
        sym.eval_xyz(p).re,
        p[2]
    );

    // The field-strength sum over an icosphere recovers the level.
    let out = chern_number(&m, &TriangleMesh::icosphere(3))?;
    println!("chern number = {} (residual {:.2e})", out.chern_number, out.residual);
    Ok(())
}
