use critgap::contour::*;
use critgap::special::recip_gamma;
use critgap::{Complex64, Error};

#[test]
fn hairpin_structure_and_path_integral() {
    let g = build_hairpin(0.25, 0.25, 10.0, 16, 16).unwrap();
    let integral: Complex64 = g.weights.iter().sum();
    assert!((integral - Complex64::new(0.0, 0.5)).norm() < 1e-13);
    assert!(g.labels.iter().all(|&l| l == ContourLabel::Gamma));
    assert!(g.min_pole_distance() >= 0.125);
}

#[test]
fn vertical_structure() {
    let g = build_vertical(0.5, 8.0, 16, 16).unwrap();
    assert_eq!(g.len(), 256);
    assert!(g.nodes.iter().all(|z| (z.re - 0.5).abs() < 1e-15));
    let gauss = g.integrate(|s| (s * s).exp());
    assert!((gauss - Complex64::new(0.0, std::f64::consts::PI.sqrt())).norm() < 1e-12);
}

#[test]
fn vertical_integral_stable_in_height() {
    let f = |g: &QuadratureGrid| g.integrate(|s| recip_gamma(s) * (s * s - 3.0 * s).exp());
    let a = f(&build_vertical(0.5, 8.0, 16, 16).unwrap());
    let b = f(&build_vertical(0.5, 16.0, 32, 16).unwrap());
    assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()));
}

#[test]
fn residue_sum_reproduced() {
    let oracle = critgap::rh::residue_sum(2.0, 1.0);
    for panels in [16, 32] {
        let g = build_hairpin(0.25, 0.25, 10.0, panels, 16).unwrap();
        let v = gamma_contour_integral(2.0, 1.0, &g);
        assert!((v - oracle).norm() < 1e-10, "panels = {panels}");
    }
}

#[test]
fn deformed_geometry() {
    let g = Geometry::deformed(2.0, 4.0).unwrap();
    assert_eq!((g.nose, g.line), (0.125, 2.0));
    assert!(matches!(Geometry::deformed(1.0, 1.0), Err(Error::Geometry(_))));
    assert!(matches!(
        deformed_contours(1.0, 0.5, 10.0, 16, 16),
        Err(Error::Geometry(_))
    ));
}

#[test]
fn bad_hairpins_rejected() {
    assert!(build_hairpin(0.6, 0.25, 10.0, 16, 16).is_err());
    assert!(build_hairpin(0.25, 0.25, 4.0, 16, 16).is_err());
    assert!(build_hairpin(0.25, 0.25, 10.0, 2, 16).is_err());
    assert!(build_hairpin(0.25, 0.25, 10.0, 16, 80).is_err());
    assert!(build_vertical(0.5, 3.0, 16, 16).is_err());
}

#[test]
fn grid_json_round_trip() {
    let g = build_vertical(0.5, 6.0, 4, 4).unwrap();
    let back: QuadratureGrid = serde_json::from_str(&g.to_json()).unwrap();
    assert_eq!(back.nodes, g.nodes);
    assert_eq!(back.labels, g.labels);
}
