//! Spin-j representations by the ladder construction and the Schur-lemma
//! overcompleteness check for the highest-weight coherent orbit.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::models::ModelSpace;
use crate::numerics::gauss_legendre;

use super::dense::{self, dagger, expm, identity, max_abs_diff, trace};
use super::{chart_from_xyz, coherent_projection};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The standard spin matrices for twice-spin j2 (dimension j2 + 1), in the
/// |j, m> basis ordered m = -j..j, with real ladder matrix elements
/// sqrt(j(j+1) - m(m+-1)).
pub struct SpinMatrices {
    pub jz: Array2<Complex64>,
    pub jp: Array2<Complex64>,
    pub jm: Array2<Complex64>,
    pub jx: Array2<Complex64>,
    pub jy: Array2<Complex64>,
}

pub fn spin_matrices(j2: u32) -> SpinMatrices {
    let dim = (j2 + 1) as usize;
    let j = j2 as f64 / 2.0;
    let mut jz = Array2::zeros((dim, dim));
    let mut jp = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..dim {
        let m = i as f64 - j;
        jz[(i, i)] = c(m, 0.0);
        if i + 1 < dim {
            jp[(i + 1, i)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = dagger(&jp);
    let jx = (&jp + &jm).mapv(|v| 0.5 * v);
    let jy = (&jp - &jm).mapv(|v| v * c(0.0, -0.5));
    SpinMatrices { jz, jp, jm, jx, jy }
}

/// Rotation taking the north pole to (theta, phi).
fn rotation(sm: &SpinMatrices, theta: f64, phi: f64) -> Array2<Complex64> {
    let axis = &sm.jx.mapv(|v| v * c(-phi.sin(), 0.0)) + &sm.jy.mapv(|v| v * c(phi.cos(), 0.0));
    expm(&axis.mapv(|v| v * c(0.0, -theta)))
}

#[derive(Debug, Clone, Serialize)]
pub struct SchurOutcome {
    /// || rescaled integral - identity ||.
    pub identity_residual: f64,
    /// max over generators of ||[M, J_i]|| before rescaling.
    pub commutator_residual: f64,
    /// trace of the rescaled integral (equals dim by construction).
    pub trace: f64,
    /// sup over test points of ||q_cs(x) - T q_su2(x) T*|| for the fitted
    /// fixed unitary T.
    pub match_residual: f64,
    /// || T* T - identity ||.
    pub unitarity_residual: f64,
}

/// Builds the spin-j irrep, integrates the highest-weight coherent orbit
/// over the sphere, and checks overcompleteness via Schur's lemma; also
/// matches the orbit projections against the Bergman coherent projections
/// up to one fixed unitary.
pub fn su2_schur_check(j2: u32) -> Result<SchurOutcome> {
    if j2 == 0 {
        return Err(crate::error::CsqError::Param("twice-spin j2 must be >= 1".into()));
    }
    let dim = (j2 + 1) as usize;
    let sm = spin_matrices(j2);
    // highest-weight vector |j, j>
    let mut w = vec![c(0.0, 0.0); dim];
    w[dim - 1] = c(1.0, 0.0);

    let orbit_vector = |theta: f64, phi: f64| -> Vec<Complex64> {
        let u = rotation(&sm, theta, phi);
        (0..dim).map(|i| u[(i, dim - 1)]).collect()
    };
    let proj_of = |v: &[Complex64]| -> Array2<Complex64> {
        Array2::from_shape_fn((dim, dim), |(a, b)| v[a] * v[b].conj())
    };

    // Integrate q over the sphere: Gauss-Legendre in cos(theta) (the
    // phi-average leaves polynomials in cos(theta) of degree <= 2j),
    // uniform trapezoid in phi (exact for the occurring harmonics).
    let nc = dim + 4;
    let nphi = 4 * dim + 8;
    let (gc, gw) = gauss_legendre(nc);
    let mut integral = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..nc {
        let theta = gc[i].acos();
        for p in 0..nphi {
            let phi = 2.0 * std::f64::consts::PI * p as f64 / nphi as f64;
            let v = orbit_vector(theta, phi);
            let q = proj_of(&v);
            let wgt = gw[i] * 2.0 * std::f64::consts::PI / nphi as f64;
            integral = integral + q.mapv(|x| x * c(wgt, 0.0));
        }
    }

    let commutator_residual = [&sm.jx, &sm.jy, &sm.jz]
        .iter()
        .map(|g| {
            let comm = integral.dot(*g) - g.dot(&integral);
            dense::max_abs(&comm)
        })
        .fold(0.0, f64::max);

    let tr = trace(&integral).re;
    let rescaled = integral.mapv(|x| x * c(dim as f64 / tr, 0.0));
    let identity_residual = max_abs_diff(&rescaled, &identity(dim));
    let trace_rescaled = trace(&rescaled).re;

    // Fixed-unitary match against the Bergman coherent projections.
    let m = ModelSpace::sphere(j2)?;
    let fit_angles: Vec<(f64, f64)> = (0..dim)
        .map(|i| {
            let theta = std::f64::consts::PI * (i as f64 + 0.7) / (dim as f64 + 1.0);
            let phi = 2.399963 * i as f64; // golden-angle spread
            (theta, phi)
        })
        .collect();
    let us: Vec<Vec<Complex64>> = fit_angles.iter().map(|&(t, p)| orbit_vector(t, p)).collect();
    let vs: Vec<Vec<Complex64>> = fit_angles
        .iter()
        .map(|&(t, p)| {
            let xyz = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
            super::coherent_vector(j2, chart_from_xyz(xyz))
        })
        .collect();
    let u1 = Array2::from_shape_fn((dim, dim), |(a, b)| us[b][a]);
    let g1 = dagger(&u1).dot(&u1);
    let vmat = Array2::from_shape_fn((dim, dim), |(a, b)| vs[b][a]);
    let g2 = dagger(&vmat).dot(&vmat);
    let phases: Vec<Complex64> = (0..dim)
        .map(|jcol| {
            if jcol == 0 {
                c(1.0, 0.0)
            } else {
                let ratio = g1[(0, jcol)] / g2[(0, jcol)];
                ratio / ratio.norm()
            }
        })
        .collect();
    let vd = Array2::from_shape_fn((dim, dim), |(a, b)| vmat[(a, b)] * phases[b]);
    let u1_inv = dense::invert(&u1)
        .ok_or_else(|| crate::error::CsqError::Param("degenerate fit points for unitary match".into()))?;
    let t_mat = vd.dot(&u1_inv);
    let unitarity_residual = max_abs_diff(&dagger(&t_mat).dot(&t_mat), &identity(dim));

    let mut match_residual = 0.0f64;
    for i in 0..(2 * dim) {
        let theta = std::f64::consts::PI * (i as f64 + 0.35) / (2.0 * dim as f64 + 1.0);
        let phi = 1.0 + 0.77 * i as f64;
        let q1 = proj_of(&orbit_vector(theta, phi));
        let xyz = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let q2 = coherent_projection(&m, chart_from_xyz(xyz))?;
        let conj = t_mat.dot(&q1).dot(&dagger(&t_mat));
        match_residual = match_residual.max(max_abs_diff(&conj, &q2.mat));
    }

    Ok(SchurOutcome {
        identity_residual,
        commutator_residual,
        trace: trace_rescaled,
        match_residual,
        unitarity_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_matrix_algebra() {
        for j2 in [1u32, 2, 4] {
            let sm = spin_matrices(j2);
            // [Jx, Jy] = i Jz
            let comm = sm.jx.dot(&sm.jy) - sm.jy.dot(&sm.jx);
            let expect = sm.jz.mapv(|v| v * c(0.0, 1.0));
            assert!(max_abs_diff(&comm, &expect) < 1e-13, "j2={j2}");
            // Casimir = j(j+1)
            let j = j2 as f64 / 2.0;
            let cas = sm.jx.dot(&sm.jx) + sm.jy.dot(&sm.jy) + sm.jz.dot(&sm.jz);
            let expect = identity((j2 + 1) as usize).mapv(|v| v * c(j * (j + 1.0), 0.0));
            assert!(max_abs_diff(&cas, &expect) < 1e-12);
        }
    }

    #[test]
    fn rotation_moves_highest_weight_as_expected() {
        // 2-dim brute-force integral oracle: for j2 = 1 the orbit vector at
        // (theta, phi) must be (sin(theta/2) e^{-i phi}-phase-ish, cos..)
        // up to global phase; check |components|.
        let sm = spin_matrices(1);
        let v = {
            let u = rotation(&sm, 1.1, 0.6);
            [u[(0, 1)], u[(1, 1)]]
        };
        assert!((v[0].norm() - (1.1f64 / 2.0).sin()).abs() < 1e-12);
        assert!((v[1].norm() - (1.1f64 / 2.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn schur_check_small_spins() {
        for j2 in [1u32, 2] {
            let out = su2_schur_check(j2).unwrap();
            assert!(out.identity_residual < 1e-8, "j2={j2}: {}", out.identity_residual);
            assert!(out.commutator_residual < 1e-8, "j2={j2}: {}", out.commutator_residual);
            assert!((out.trace - (j2 as f64 + 1.0)).abs() < 1e-12);
            assert!(out.unitarity_residual < 1e-8, "j2={j2}: {}", out.unitarity_residual);
            assert!(out.match_residual < 1e-8, "j2={j2}: {}", out.match_residual);
        }
    }
}
