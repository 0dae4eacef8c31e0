use critgap::contour::*;
use critgap::fredholm::*;
use critgap::kernels::CritKernel;
use critgap::Complex64;

fn crit(alpha: f64) -> CritKernel {
    CritKernel::from_pair(alpha, &ContourPair::default_for(alpha, &Resolution::default()).unwrap()).unwrap()
}

#[test]
fn halfline_det_self_convergent() {
    let k = crit(2.0);
    let d = |n: usize| {
        let g = HalfLineGrid::new(3.0, 40.0, n / 16, 16);
        det_i_minus(&halfline_operator(&k, &g, Weighting::Symmetric)).value
    };
    assert!((d(64) - d(128)).norm() < 1e-9);
}

#[test]
fn weighting_invariance() {
    let k = crit(1.0);
    let g = HalfLineGrid::new(1.0, 40.0, 8, 16);
    let s = det_i_minus(&halfline_operator(&k, &g, Weighting::Symmetric)).value;
    let r = det_i_minus(&halfline_operator(&k, &g, Weighting::RightWeight)).value;
    assert!((s - r).norm() <= 1e-12 * s.norm());
}

#[test]
fn small_norm_matches_two_term_series() {
    let k = crit(2.0);
    let g = HalfLineGrid::new(5.0, 40.0, 8, 16);
    let op = halfline_operator(&k, &g, Weighting::Symmetric);
    let tr = trace(&op);
    let tr2 = op.matrix.matmul(&op.matrix).trace();
    let series = 1.0 - tr + 0.5 * (tr * tr - tr2);
    assert!((det_i_minus(&op).value - series).norm() < 1e-6);
}

#[test]
fn trace_values() {
    let k = crit(1.0);
    let tr = |a: f64| {
        trace(&halfline_operator(
            &k,
            &HalfLineGrid::new(a, 40.0, 16, 16),
            Weighting::Symmetric,
        ))
    };
    let t0 = tr(0.0);
    // doubled-resolution reference
    assert!((t0.re - 0.513_156_513_858_635).abs() < 1e-11);
    assert!(t0.im.abs() < 1e-12);
    let ts: Vec<f64> = [0.0, 1.0, 2.0, 4.0].iter().map(|&a| tr(a).re).collect();
    assert!(ts.windows(2).all(|w| w[1] < w[0]), "{ts:?}");
}

#[test]
fn resolve_residual() {
    let n = 30;
    let w = vec![Complex64::new(1.0, 0.0); n];
    let op = DiscreteOperator::assemble(
        |i, j| {
            Ok(Complex64::new(
                ((i * 3 + j) as f64).sin() / n as f64,
                ((i + 2 * j) as f64).cos() / n as f64,
            ))
        },
        &w,
        &w,
        Weighting::RightWeight,
    )
    .unwrap();
    let b: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, -1.0)).collect();
    let x = resolve(&op, std::slice::from_ref(&b)).unwrap().remove(0);
    let ax = op.matrix.mul_vec(&x);
    let r = x
        .iter()
        .zip(&ax)
        .zip(&b)
        .map(|((x, ax), b)| (x - ax - b).norm())
        .fold(0.0, f64::max);
    assert!(r < 1e-12);
}

#[test]
fn routes_agree_and_are_monotone() {
    let res = Resolution::default();
    let mut last = 0.0;
    for a in [1.0, 2.0, 3.0] {
        let h = gap_probability(a, 1.0, Route::Halfline, &res).unwrap();
        let q = gap_probability(a, 1.0, Route::ContourQ, &res).unwrap();
        assert!((h.p - q.p).abs() <= 1e-7);
        assert!(q.p > last && q.p <= 1.0 + 1e-12);
        assert!(q.err < 1e-7);
        last = q.p;
    }
}

#[test]
fn deformation_invariance() {
    let res = Resolution::default();
    for alpha in [0.5, 1.0, 2.0] {
        for a in [2.0, 3.0, 5.0] {
            let d = route_determinant(a, alpha, Route::ContourQ, &res).unwrap().value;
            let g = Geometry::deformed(alpha, a).unwrap();
            let e = route_determinant_on(a, alpha, Route::ContourQ, &res, g).unwrap().value;
            assert!((d - e).norm() < 1e-8, "a={a} alpha={alpha} {}", (d - e).norm());
        }
    }
}

#[test]
fn h_route_equals_q_route() {
    let res = Resolution::default();
    let q = route_determinant(2.0, 1.0, Route::ContourQ, &res).unwrap().value;
    let h = route_determinant(2.0, 1.0, Route::ContourH, &res).unwrap().value;
    assert!((q - h).norm() < 1e-8);
}

#[test]
fn large_a_tail() {
    let v = gap_probability(12.0, 2.0, Route::ContourQ, &Resolution::default()).unwrap();
    let eps = 1.0 - v.p;
    assert!(eps.abs() <= (-6.0f64).exp());
    assert!(gap_probability(-1.0, 2.0, Route::ContourQ, &Resolution::default()).is_err());
}
