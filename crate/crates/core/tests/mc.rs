use critgap::mc::*;
use critgap::Complex64;

#[test]
fn scalar_case_is_log_exponential() {
    let cfg = McConfig::new(1, 1, 10_000, 11).unwrap();
    let r = sample_rightmost(&cfg).unwrap();
    let d = ks_distance(&r.samples, |y| log_exponential_cdf(y + r.a_n));
    assert!(d < ks_critical_1pct(r.samples.len()), "KS {d}");
}

#[test]
fn same_seed_same_samples() {
    let cfg = McConfig::new(4, 3, 200, 7).unwrap();
    let a = sample_rightmost(&cfg).unwrap();
    let b = sample_rightmost(&cfg).unwrap();
    assert_eq!(a, b);
    let c = sample_rightmost(&McConfig { seed: 8, ..cfg }).unwrap();
    assert_ne!(a.samples, c.samples);
}

#[test]
fn shards_match_sequential() {
    let cfg = McConfig::new(3, 2, 150, 5).unwrap();
    let all = sample_rightmost(&cfg).unwrap().samples;
    let mut pieces = sample_range(&cfg, 0..37).unwrap();
    pieces.extend(sample_range(&cfg, 37..100).unwrap());
    pieces.extend(sample_range(&cfg, 100..150).unwrap());
    assert_eq!(all, pieces);
}

#[test]
fn rescaled_product_matches_direct() {
    for trial in 0..20 {
        let mut rng = trial_rng(99, trial);
        let f = draw_factors(&mut rng, 4, 3);
        let direct = top_log_eigenvalue(&f, 4, false).unwrap();
        let scaled = top_log_eigenvalue(&f, 4, true).unwrap();
        assert!((direct - scaled).abs() < 1e-10, "{direct} {scaled}");
    }
}

#[test]
fn power_iteration_matches_jacobi() {
    for n in 1..=8 {
        for trial in 0..5 {
            let mut rng = trial_rng(n as u64, trial);
            let f = draw_factors(&mut rng, n, 2);
            let (p, _) = product(&f, n, true);
            let h = gram(&p, n);
            let top = jacobi_eigenvalues(&h, n).into_iter().fold(f64::MIN, f64::max);
            let pw = power_iteration(&h, n).unwrap();
            assert!((pw - top).abs() <= 1e-9 * top, "n={n} {pw} {top}");
        }
    }
}

#[test]
fn gram_is_hermitian() {
    let mut rng = trial_rng(1, 1);
    let f = draw_factors(&mut rng, 5, 1);
    let h = gram(&f[0], 5);
    for i in 0..5 {
        for j in 0..5 {
            assert!((h[i * 5 + j] - h[j * 5 + i].conj()).norm() < 1e-14);
        }
    }
    assert!(h.iter().step_by(6).all(|d: &Complex64| d.re > 0.0 && d.im == 0.0));
}

#[test]
fn centering_constant() {
    assert!((center_an(1, 1).unwrap() + 1.0).abs() < 1e-15);
    let v = center_an(48, 96).unwrap();
    assert!((v - 97.0 * (48f64.ln() - 1.0 / 96.0)).abs() < 1e-12);
}

#[test]
fn config_bounds() {
    assert!(McConfig::new(0, 1, 1, 0).is_err());
    assert!(McConfig::new(1, MAX_DIM + 1, 1, 0).is_err());
    assert!(McConfig::new(2, 2, 0, 0).is_err());
    assert!(McConfig::new(MAX_DIM, 1, 1, 0).is_ok());
}

#[test]
fn csv_round_trip() {
    let cfg = McConfig::new(2, 2, 50, 3).unwrap();
    let r = sample_rightmost(&cfg).unwrap();
    let csv = samples_csv(&r);
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("x"));
    let back: Vec<f64> = lines.map(|l| l.parse().unwrap()).collect();
    let mut sorted = r.samples.clone();
    sorted.sort_by(f64::total_cmp);
    assert_eq!(back, sorted);
}

#[test]
fn quantile_and_gap_agree() {
    let cfg = McConfig::new(2, 1, 400, 21).unwrap();
    let r = sample_rightmost(&cfg).unwrap();
    let med = quantile(&r.samples, 0.5);
    let (p, ci) = empirical_gap(&r, med);
    assert!((p - 0.5).abs() < 0.01 && ci > 0.0);
}
