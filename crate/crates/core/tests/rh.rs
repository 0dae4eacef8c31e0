use critgap::contour::*;
use critgap::fredholm::{route_determinant, Route};
use critgap::rh::*;

fn log_p(a: f64, alpha: f64) -> f64 {
    route_determinant(a, alpha, Route::ContourQ, &Resolution::default())
        .unwrap()
        .log
        .re
}

#[test]
fn y1_log_derivative_and_ode() {
    let res = Resolution::default();
    let (a, alpha, h) = (2.0, 1.0, 1e-3);
    let y = y1_matrix(a, alpha, &res).unwrap();
    assert!(y.e11.im.abs() < 1e-8 && (y.e12 * y.e21).im.abs() < 1e-8);
    let d = (log_p(a + h, alpha) - log_p(a - h, alpha)) / (2.0 * h);
    assert!((y.e11.re - d).abs() < 1e-5);
    let d11 = (y1_matrix(a + h, alpha, &res).unwrap().e11 - y1_matrix(a - h, alpha, &res).unwrap().e11) / (2.0 * h);
    assert!((d11 - y.e12 * y.e21).norm() < 1e-4);
}

#[test]
fn u_is_second_log_derivative() {
    let (a, alpha, h) = (2.0, 1.0, 1e-2);
    let f: Vec<f64> = (-2..=2).map(|k| log_p(a + k as f64 * h, alpha)).collect();
    let d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
    let u = u_of_x(a, alpha, &Resolution::default()).unwrap();
    assert!(u.u_imag.abs() < 1e-8);
    assert!((u.u + d2).abs() <= 1e-3 * u.u.abs(), "{} {}", u.u, -d2);
}

#[test]
fn y1_vanishes_for_large_a() {
    let y = y1_matrix(8.0, 2.0, &Resolution::default()).unwrap();
    assert!(y.e11.norm() <= 1e-6);
}

#[test]
fn y1_is_contour_independent() {
    let res = Resolution::default();
    for alpha in [0.5, 1.0, 2.0] {
        for a in [2.0, 4.0] {
            let y = y1_matrix_on(a, alpha, &ContourPair::default_for(alpha, &res).unwrap()).unwrap();
            let pair = ContourPair::build(Geometry::deformed(alpha, a).unwrap(), alpha, &res).unwrap();
            let z = y1_matrix_on(a, alpha, &pair).unwrap();
            for (p, q) in [(y.e11, z.e11), (y.e12, z.e12), (y.e21, z.e21), (y.e22, z.e22)] {
                assert!((p - q).norm() < 1e-7, "a={a} alpha={alpha} {p} {q}");
            }
        }
    }
}

#[test]
fn u_positive_and_asymptotic() {
    let res = Resolution::default();
    let mut ratios = Vec::new();
    for x in [4.0, 6.0, 8.0] {
        let u = u_of_x(x, 2.0, &res).unwrap();
        assert!(u.u > 0.0);
        ratios.push(u.u / u.u_asym);
    }
    assert!((ratios[1] - 1.0).abs() < 0.2);
    assert!((ratios[2] - 1.0).abs() < (ratios[1] - 1.0).abs());
}

#[test]
fn u_asymptotic_values() {
    assert!((u_asymptotic(2.0, 2.0).unwrap() - 0.103_776_874_355_148_7).abs() < 1e-15);
    assert!((u_asymptotic(1.0, 1.0).unwrap() - 0.241_970_724_519_143_3).abs() < 1e-15);
    // 40-digit reference
    let v = u_asymptotic(10.0, 2.0).unwrap();
    assert!((v / 8.542_491_838_342_9e-14 - 1.0).abs() < 1e-12);
}

#[test]
fn log_gap_closure() {
    let res = Resolution::default();
    let curve = UCurve::tabulate(1.0, &[3.0], 8, &res).unwrap();
    assert!((curve.log_gap(3.0).unwrap() - log_p(3.0, 1.0)).abs() < 1e-4);
    assert!(curve.log_gap(2.5).is_err());
    assert!(curve.nodes.iter().zip(&curve.u).all(|(&x, &u)| (x - 3.0) * u >= 0.0));
    let far = UCurve::tabulate(1.0, &[7.0], 8, &res).unwrap().log_gap(7.0).unwrap();
    assert!(far <= 0.0 && far > -1e-12);
}

#[test]
fn u1_21_routes() {
    let res = Resolution::default();
    let q = asym_u1_21(4.0, 2.0, &res).unwrap();
    let r = asym_u1_21_residue(4.0, 2.0);
    assert!((q - r).norm() <= 1e-10 * r.norm());
    assert!(asym_u1_21(1.0, 2.0, &res).is_err());
    let e = |x: f64| x.exp();
    let direct = 1.0 - e(-2.0) + e(-6.0) / 2.0 - e(-12.0) / 6.0 + e(-20.0) / 24.0 - e(-30.0) / 120.0;
    assert!((residue_sum(2.0, 1.0) - direct).abs() < 1e-15);
    // normalized value tends to 1
    let norm = |a: f64| {
        let v = asym_u1_21_residue(a, 2.0);
        (v * (a / 2.0) * (a * a / 8.0).exp()).im
    };
    assert!((norm(10.0) - 1.0).abs() < (norm(4.0) - 1.0).abs());
    assert!((norm(10.0) - 1.0).abs() < 1e-4);
    let s: Vec<f64> = [2.0, 3.0, 4.0, 6.0].iter().map(|&a| residue_sum(2.0, a)).collect();
    assert!(s.windows(2).all(|w| w[0] < w[1] && w[1] < 1.0));
}

#[test]
fn u1_12_shape() {
    let v = asym_u1_12(4.0, 2.0).unwrap();
    assert!(v.value.re.abs() <= 1e-10 * v.value.norm());
    let a8 = asym_u1_12_truncated(4.0, 2.0, 8.0).unwrap().value;
    let a12 = asym_u1_12_truncated(4.0, 2.0, 12.0).unwrap().value;
    assert!((a8 - a12).norm() <= 1e-12 * a12.norm());
    let ratio = |a: f64| (asym_u1_12(a, 2.0).unwrap().value / asym_u1_12_closed(a, 2.0).unwrap()).re;
    assert!((ratio(6.0) - 1.0).abs() < 0.25);
    assert!((ratio(10.0) - 1.0).abs() < (ratio(6.0) - 1.0).abs());
    assert!(asym_u1_12(60.0, 0.5).unwrap().underflow);
}

#[test]
fn composed_asymptotics() {
    let res = Resolution::default();
    let c = u_asym_composed(6.0, 2.0, &res).unwrap();
    assert!(c > 0.0);
    let r = c / u_asymptotic(6.0, 2.0).unwrap();
    assert!((0.7..=1.3).contains(&r));
    let r = c / u_of_x(6.0, 2.0, &res).unwrap().u;
    assert!((0.7..=1.3).contains(&r));
}
