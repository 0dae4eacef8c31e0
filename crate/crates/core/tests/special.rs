use critgap::special::{gamma, log_gamma, recip_gamma};
use critgap::{Complex64, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn gamma_oracle_left_half_plane() {
    // 40-digit reference
    let expect = c(-2.754_726_975_789_625_7, -0.031_000_416_375_413_389);
    assert!(rel(gamma(c(-0.5, 0.25)).unwrap(), expect) < 1e-12);
}

#[test]
fn log_gamma_large_argument() {
    let expect = c(359.008_631_102_748_81, 23.002_911_942_423_655);
    assert!(rel(log_gamma(c(100.0, 5.0)).unwrap(), expect) < 1e-11);
    let v = log_gamma(c(10.0, 0.0)).unwrap();
    assert!((v.re - 12.801_827_480_081_469).abs() < 1e-12);
}

#[test]
fn recip_gamma_oracle() {
    let expect = c(42.294_980_209_691_68, -13.539_817_708_865_499);
    assert!(rel(recip_gamma(c(0.5, 3.0)), expect) < 1e-12);
    assert_eq!(recip_gamma(c(0.0, 0.0)), c(0.0, 0.0));
}

#[test]
fn log_gamma_consistent_with_gamma() {
    for z in [c(0.2, 0.1), c(3.5, -2.0), c(12.0, 9.0), c(20.0, 0.5), c(0.7, 25.0)] {
        let g = gamma(z).unwrap();
        assert!(rel(log_gamma(z).unwrap().exp(), g) < 1e-11, "{z}");
    }
}

#[test]
fn overflow_is_reported() {
    assert!(matches!(gamma(c(200.0, 0.0)), Err(Error::Overflow { .. })));
}

#[test]
fn identities_on_grid() {
    let mut worst_rec: f64 = 0.0;
    let mut worst_conj: f64 = 0.0;
    for i in 0..20 {
        for j in 0..10 {
            let z = c(
                -5.0 + 25.0 * (i as f64 + 0.37) / 20.0,
                -10.0 + 20.0 * (j as f64 + 0.5) / 10.0,
            );
            if z.re <= 0.5 && c(z.re - z.re.round(), z.im).norm() < 0.1 {
                continue;
            }
            let g0 = gamma(z).unwrap();
            let g1 = gamma(z + 1.0).unwrap();
            worst_rec = worst_rec.max((g1 - z * g0).norm() / g1.norm());
            worst_conj = worst_conj.max(rel(gamma(z.conj()).unwrap(), g0.conj()));
        }
    }
    assert!(worst_rec <= 1e-11, "{worst_rec}");
    assert!(worst_conj <= 1e-12, "{worst_conj}");
}

#[test]
fn residues_at_poles() {
    let mut fact = 1.0;
    for k in 0..=6 {
        if k > 0 {
            fact *= k as f64;
        }
        let h = 1e-6;
        let v = h * gamma(c(-(k as f64) + h, 0.0)).unwrap();
        let expect = if k % 2 == 0 { 1.0 / fact } else { -1.0 / fact };
        assert!((v.re - expect).abs() * fact < 1e-5, "k = {k}");
    }
}
