use super::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sample_points(model: &ModelSpace) -> Vec<ChartPoint> {
    match model.kind() {
        ModelKind::Sphere { .. } => vec![
            ChartPoint::main_xy(0.0, 0.0),
            ChartPoint::main_xy(1.0, 0.0),
            ChartPoint::main_xy(0.3, -0.7),
            ChartPoint::main_xy(-1.2, 2.1),
            ChartPoint::main_xy(0.01, 0.02),
        ],
        ModelKind::Plane { .. } => vec![
            ChartPoint::main_xy(0.0, 0.0),
            ChartPoint::main_xy(1.0, 0.5),
            ChartPoint::main_xy(-0.4, 1.7),
            ChartPoint::main_xy(2.0, -1.0),
        ],
        ModelKind::HalfPlane { .. } => vec![
            ChartPoint::main_xy(0.0, 1.0),
            ChartPoint::main_xy(0.5, 0.3),
            ChartPoint::main_xy(-1.0, 2.0),
            ChartPoint::main_xy(2.0, 0.7),
        ],
        ModelKind::Podles { .. } | ModelKind::QuarticLeaf { .. } => vec![
            ChartPoint::main_xy(0.5, 0.0),
            ChartPoint::main_xy(1.0, 0.5),
            ChartPoint::main_xy(-0.4, 1.1),
            ChartPoint::main_xy(0.9, -0.8),
        ],
    }
}

fn all_models() -> Vec<ModelSpace> {
    vec![
        ModelSpace::sphere(3).unwrap(),
        ModelSpace::plane(0.7).unwrap(),
        ModelSpace::half_plane(3).unwrap(),
        ModelSpace::podles(0.5).unwrap(),
        ModelSpace::quartic_leaf(0.4).unwrap(),
    ]
}

#[test]
fn diagonal_is_unit() {
    for m in all_models() {
        for p in sample_points(&m) {
            let s = m.eval_propagator(p, p).unwrap();
            assert!((s.value - c(1.0, 0.0)).norm() < 1e-12, "{:?}", m.kind());
            assert!((s.weighted_modulus - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn sphere_substitution_oracle() {
    // n=2, w=0, z=1: value 1, weighted modulus^2 = (1+1)^{-2} = 0.25.
    let m = ModelSpace::sphere(2).unwrap();
    let s = m
        .eval_propagator(ChartPoint::main_xy(0.0, 0.0), ChartPoint::main_xy(1.0, 0.0))
        .unwrap();
    assert!((s.value - c(1.0, 0.0)).norm() < 1e-14);
    assert!((s.weighted_modulus.powi(2) - 0.25).abs() < 1e-14);
}

#[test]
fn plane_substitution_oracle() {
    let m = ModelSpace::plane(0.5).unwrap();
    let s = m
        .eval_propagator(ChartPoint::main_xy(0.0, 0.0), ChartPoint::main_xy(1.0, 0.0))
        .unwrap();
    assert!((s.value.re - (-1.0f64).exp()).abs() < 1e-14, "{}", s.value);
    assert!(s.value.im.abs() < 1e-15);
}

#[test]
fn halfplane_substitution_oracle() {
    // k=2, x=i, y=2i: weighted modulus = |2i sqrt(2)/(3i)|^2 = 8/9.
    let m = ModelSpace::half_plane(2).unwrap();
    let s = m
        .eval_propagator(ChartPoint::main_xy(0.0, 1.0), ChartPoint::main_xy(0.0, 2.0))
        .unwrap();
    assert!((s.weighted_modulus - 8.0 / 9.0).abs() < 1e-14);
}

#[test]
fn halfplane_rejects_lower_half() {
    let m = ModelSpace::half_plane(2).unwrap();
    let bad = ChartPoint::main_xy(0.0, -1.0);
    assert!(m.eval_propagator(bad, ChartPoint::main_xy(0.0, 1.0)).is_err());
}

#[test]
fn hermiticity_of_weighted_kernel() {
    // value(x,y) h(y) = conj(value(y,x)) h(x) within 1e-12 at sampled pairs.
    for m in all_models() {
        let pts = sample_points(&m);
        for &x in &pts {
            for &y in &pts {
                let hx = m.metric_weight(x).unwrap();
                let hy = m.metric_weight(y).unwrap();
                let vxy = m.eval_propagator(x, y).unwrap().value;
                let vyx = m.eval_propagator(y, x).unwrap().value;
                let lhs = vxy * hy;
                let rhs = vyx.conj() * hx;
                assert!(
                    (lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()),
                    "{:?} at {x:?},{y:?}: {lhs} vs {rhs}",
                    m.kind()
                );
                // Unitary-gauge form is literally conjugate symmetric.
                let wxy = m.weighted_value(x, y).unwrap();
                let wyx = m.weighted_value(y, x).unwrap();
                assert!((wxy - wyx.conj()).norm() < 1e-12 * (1.0 + wxy.norm()));
            }
        }
    }
}

#[test]
fn strict_offdiagonal_contraction() {
    for m in all_models() {
        let pts = sample_points(&m);
        for &x in &pts {
            for &y in &pts {
                if (x.z - y.z).norm() > 1e-12 {
                    let wm = m.weighted_modulus(x, y).unwrap();
                    assert!(wm < 1.0, "{:?}: wm({x:?},{y:?}) = {wm}", m.kind());
                }
            }
        }
    }
}

#[test]
fn quartic_leaf_reduction() {
    let x = c(1.0, 0.0);
    assert_eq!(leaf_reduce_quartic(x, x).unwrap().0, c(0.0, 0.0));
    // lambda(1, 2) = (2-1)/(2*1*1) = 0.5
    let (l, _) = leaf_reduce_quartic(c(1.0, 0.0), c(2.0, 0.0)).unwrap();
    assert!((l - c(0.5, 0.0)).norm() < 1e-15);
    assert!(leaf_reduce_quartic(c(0.0, 0.0), c(1.0, 0.0)).is_err());
    // lambda = 0 iff x = y at generic points
    let (l, _) = leaf_reduce_quartic(c(0.3, 0.4), c(0.3, 0.40001)).unwrap();
    assert!(l.norm() > 0.0);
}

#[test]
fn quartic_jacobian_matches_complex_differentiation_oracle() {
    // jacobian_density = |x|^4 |d lambda / d y|^2, with the derivative taken
    // numerically.
    let x = c(0.8, -0.3);
    let y = c(1.3, 0.9);
    let h = 1e-6;
    let l = |yy: Complex64| (yy - x) / (yy * x.norm_sqr() * x.conj());
    let dldy = (l(y + c(h, 0.0)) - l(y - c(h, 0.0))) / c(2.0 * h, 0.0);
    let oracle = x.norm_sqr().powi(2) * dldy.norm_sqr();
    let (_, jd) = leaf_reduce_quartic(x, y).unwrap();
    assert!((jd - oracle).abs() < 1e-7 * oracle, "{jd} vs {oracle}");
    assert!((jd - 1.0 / y.norm_sqr().powi(2)).abs() < 1e-14);
}

#[test]
fn quartic_kernel_agrees_with_lambda_route() {
    // Independent simplification: the exponent equals
    // (-|1/x - 1/y|^2 + 2i Im(x conj(y)) / (|x|^2 |y|^2)) / (4 hbar).
    let hbar = 0.4;
    let m = ModelSpace::quartic_leaf(hbar).unwrap();
    for (x, y) in [(c(1.0, 0.2), c(0.7, -0.5)), (c(-0.6, 1.1), c(0.4, 0.4))] {
        let v = m
            .eval_propagator(ChartPoint::main(x), ChartPoint::main(y))
            .unwrap()
            .value;
        let d2 = x.norm_sqr() * y.norm_sqr();
        let expo = (-(y - x).norm_sqr() + c(0.0, 2.0 * (x * y.conj()).im) ) / (4.0 * hbar * d2);
        assert!((v - expo.exp()).norm() < 1e-13);
    }
}

#[test]
fn measure_density_oracles() {
    // Sphere n=4 at z=0: (n+1)/pi before calibration.
    let m = ModelSpace::sphere(4).unwrap();
    let d = m.measure_density(ChartPoint::main_xy(0.0, 0.0)).unwrap();
    assert!((d - 5.0 / std::f64::consts::PI).abs() < 1e-14);
    // Plane hbar=1: 1/(2 pi), from i dz wedge dz-bar = 2 dA.
    let m = ModelSpace::plane(1.0).unwrap();
    let d = m.measure_density(ChartPoint::main_xy(3.0, -2.0)).unwrap();
    assert!((d - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    // Quartic: density proportional to 1/|z|^4.
    let m = ModelSpace::quartic_leaf(0.3).unwrap();
    let z = c(1.2, -0.4);
    let d = m.measure_density(ChartPoint::main(z)).unwrap();
    assert!((d - 1.0 / z.norm_sqr().powi(2)).abs() < 1e-14);
}

#[test]
fn podles_diagonal_exact_and_hermitian() {
    let m = ModelSpace::podles(0.5).unwrap();
    let x = ChartPoint::main_xy(0.7, -0.3);
    let s = m.eval_propagator(x, x).unwrap();
    assert_eq!(s.value, c(1.0, 0.0));
    let y = ChartPoint::main_xy(-0.2, 0.9);
    let vxy = m.eval_propagator(x, y).unwrap().value;
    let vyx = m.eval_propagator(y, x).unwrap().value;
    assert_eq!(vxy, vyx.conj());
}

#[test]
fn isometry_examples() {
    // Identity leaves points alone.
    let plane = ModelSpace::plane(1.0).unwrap();
    let id = Isometry::PlaneMotion { angle: 0.0, translation: c(0.0, 0.0) };
    let p = ChartPoint::main_xy(1.3, -0.4);
    assert_eq!(plane.isometry_act(&id, p).unwrap().z, p.z);

    // Half-plane translation by 1: i -> i + 1.
    let hp = ModelSpace::half_plane(2).unwrap();
    let g = Isometry::mobius_real([[1.0, 1.0], [0.0, 1.0]]).unwrap();
    let img = hp.isometry_act(&g, ChartPoint::main_xy(0.0, 1.0)).unwrap();
    assert!((img.z - c(1.0, 1.0)).norm() < 1e-15);

    // Plane rotation by pi: 1 -> -1.
    let rot = Isometry::PlaneMotion { angle: std::f64::consts::PI, translation: c(0.0, 0.0) };
    let img = plane.isometry_act(&rot, ChartPoint::main_xy(1.0, 0.0)).unwrap();
    assert!((img.z - c(-1.0, 0.0)).norm() < 1e-15);

    // det != 1 rejected
    assert!(Isometry::mobius_real([[2.0, 0.0], [0.0, 1.0]]).is_err());
}

#[test]
fn isometry_group_law() {
    // Acting by g1 then g2 equals acting by compose(g2, g1).
    let hp = ModelSpace::half_plane(2).unwrap();
    let g1 = Isometry::mobius_real([[1.0, 0.5], [0.0, 1.0]]).unwrap();
    let g2 = Isometry::mobius_real([[0.0, -1.0], [1.0, 0.0]]).unwrap();
    let p = ChartPoint::main_xy(0.3, 1.7);
    let seq = hp.isometry_act(&g2, hp.isometry_act(&g1, p).unwrap()).unwrap();
    let prod = hp.isometry_act(&g2.compose(&g1).unwrap(), p).unwrap();
    assert!((seq.z - prod.z).norm() < 1e-13);

    let sph = ModelSpace::sphere(2).unwrap();
    let s1 = Isometry::su2_y_rotation(0.7);
    let s2 = Isometry::su2(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
    let p = ChartPoint::main_xy(0.4, -0.2);
    let seq = sph.isometry_act(&s2, sph.isometry_act(&s1, p).unwrap()).unwrap();
    let prod = sph.isometry_act(&s2.compose(&s1).unwrap(), p).unwrap();
    assert!((sphere_xyz(seq)[0] - sphere_xyz(prod)[0]).abs() < 1e-12);
    assert!((sphere_xyz(seq)[2] - sphere_xyz(prod)[2]).abs() < 1e-12);
}

#[test]
fn antipodal_modulus_vanishes_via_isometry() {
    // n=1, pair (0, infinity): rotate the pair away from the pole and check
    // the weighted modulus tends to 0 (exactly 0 at the antipode).
    let m = ModelSpace::sphere(1).unwrap();
    let south = ChartPoint::main_xy(0.0, 0.0);
    let north = ChartPoint::secondary(c(0.0, 0.0));
    let wm = m.weighted_modulus(south, north).unwrap();
    assert!(wm < 1e-15);
    // Same pair moved by an isometry.
    let g = Isometry::su2_y_rotation(1.0);
    let a = m.isometry_act(&g, south).unwrap();
    let b = m.isometry_act(&g, north).unwrap();
    let wm = m.weighted_modulus(a, b).unwrap();
    assert!(wm < 1e-12);
}

#[test]
fn sphere_charts_are_consistent() {
    // The same geometric point in both charts gives the same xyz and the
    // same weighted modulus against a third point.
    let m = ModelSpace::sphere(3).unwrap();
    let z = c(1.4, -0.7);
    let p_main = ChartPoint::main(z);
    let p_sec = ChartPoint::secondary(z.finv());
    let a = sphere_xyz(p_main);
    let b = sphere_xyz(p_sec);
    for i in 0..3 {
        assert!((a[i] - b[i]).abs() < 1e-14);
    }
    let q = ChartPoint::main_xy(0.2, 0.1);
    let w1 = m.weighted_modulus(p_main, q).unwrap();
    let w2 = m.weighted_modulus(p_sec, q).unwrap();
    assert!((w1 - w2).abs() < 1e-14);
}

#[test]
fn probability_integral_closed_forms() {
    // Plane hbar=1: I = 1/2 (Gaussian oracle), so calibration will be 2.
    let m = ModelSpace::plane(1.0).unwrap();
    let i = m.probability_integral(ChartPoint::main_xy(0.3, -0.8), 1e-10).unwrap();
    assert!((i.value.re - 0.5).abs() < 1e-9, "{}", i.value.re);

    // Half-plane: I = k/(k-1) (Beta-integral oracle).
    for k in [2u32, 4] {
        let m = ModelSpace::half_plane(k).unwrap();
        let i = m.probability_integral(ChartPoint::main_xy(0.4, 1.3), 1e-9).unwrap();
        let oracle = k as f64 / (k as f64 - 1.0);
        assert!((i.value.re - oracle).abs() < 1e-8, "k={k}: {} vs {oracle}", i.value.re);
    }

    // Sphere: I = 1 exactly under the fixed convention.
    let m = ModelSpace::sphere(4).unwrap();
    let i = m.probability_integral(ChartPoint::main_xy(0.5, 0.2), 1e-10).unwrap();
    assert!((i.value.re - 1.0).abs() < 1e-9);

    // Quartic leaf: I = 2 pi hbar, the dropped kernel prefactor.
    let hbar = 0.4;
    let m = ModelSpace::quartic_leaf(hbar).unwrap();
    let i = m.probability_integral(ChartPoint::main_xy(0.9, -0.2), 1e-10).unwrap();
    assert!(
        (i.value.re - 2.0 * std::f64::consts::PI * hbar).abs() < 1e-8,
        "{} vs {}",
        i.value.re,
        2.0 * std::f64::consts::PI * hbar
    );
}

#[test]
fn podles_probability_near_one() {
    let m = ModelSpace::podles(0.5).unwrap();
    let i = m.probability_integral(ChartPoint::main_xy(0.6, 0.3), 1e-8).unwrap();
    assert!((i.value.re - 1.0).abs() < 1e-6, "{}", i.value.re);
    assert!(i.tail < 1e-9, "tail {}", i.tail);
}

#[test]
fn sphere_convolution_consistent_across_charts() {
    // The kernel integrals must stay phase-consistent with weighted_value
    // when a point is handed over in the secondary chart.
    let m = ModelSpace::sphere(2).unwrap();
    let x = ChartPoint::main_xy(0.3, -0.2);
    let z = c(1.4, 0.7);
    let y_main = ChartPoint::main(z);
    let y_sec = ChartPoint::secondary(z.finv());
    let a = m.convolution(x, y_main, 1e-10).unwrap().value;
    let b = m.convolution(x, y_sec, 1e-10).unwrap().value;
    assert!((a - b).norm() < 1e-12);
    let w = m.weighted_value(x, y_sec).unwrap();
    assert!((b - w).norm() < 1e-8, "{b} vs {w}");
}

#[test]
fn podles_truncation_guards() {
    // evaluation outside the certified chart disk is refused
    let m = ModelSpace::podles(0.5).unwrap();
    let far = ChartPoint::main_xy(9.0, 0.0);
    assert!(m.eval_propagator(far, ChartPoint::main_xy(0.5, 0.0)).is_err());
    // a forced truncation too small for the radius is rejected at build time
    assert!(ModelSpace::new(ModelKind::Podles { hbar: 0.5, terms: 2 }).is_err());
}

#[test]
fn measure_total_is_dimension() {
    for n in [1u32, 4, 8] {
        let m = ModelSpace::sphere(n).unwrap();
        let v = m.measure_total(1e-10).unwrap();
        assert!((v.value.re - (n as f64 + 1.0)).abs() < 1e-9);
    }
    assert!(ModelSpace::plane(1.0).unwrap().measure_total(1e-8).is_err());
}
