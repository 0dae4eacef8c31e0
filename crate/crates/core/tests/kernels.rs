use critgap::contour::*;
use critgap::kernels::*;
use critgap::mc::center_an;
use critgap::Complex64;

fn pair(alpha: f64, res: &Resolution) -> ContourPair {
    ContourPair::default_for(alpha, res).unwrap()
}

#[test]
fn crit_kernel_real_on_grid() {
    for alpha in [1.0, 2.0] {
        let k = CritKernel::from_pair(alpha, &pair(alpha, &Resolution::default())).unwrap();
        for x in [0.0, 1.5, 3.0] {
            for y in [0.0, 1.5, 3.0] {
                let v = k.eval(x, y);
                assert!(v.im.abs() <= 1e-9 * (1.0 + v.re.abs()));
            }
        }
    }
}

#[test]
fn crit_kernel_resolution_oracle() {
    let g = Geometry::default();
    let res = Resolution::default();
    let big = Resolution {
        panels: 64,
        arm_length: Some(auto_arm_length(1.0, &g) + 5.0),
        line_half_height: Some(auto_line_half_height(1.0, &g) + 5.0),
        ..res
    };
    let fine = kernel_crit(0.0, 0.0, 1.0, &pair(1.0, &big).gamma, &pair(1.0, &big).gamma_tilde).unwrap();
    let p = pair(1.0, &res);
    let v = kernel_crit(0.0, 0.0, 1.0, &p.gamma, &p.gamma_tilde).unwrap();
    assert!((v - fine).norm() < 1e-9);
    assert!((fine.re - 0.591_396_316_289_965).abs() < 1e-12);
}

#[test]
fn crit_kernel_matches_factorization() {
    let res = Resolution::default();
    let k = CritKernel::from_pair(2.0, &pair(2.0, &res)).unwrap();
    let f = Factorization::with_resolution(2.0, &res).unwrap();
    for (x, y) in [(0.0, 0.0), (1.0, 2.0), (3.0, 1.0)] {
        // on the real line the conjugation factor is the only difference
        let direct = k.eval_conj(x, y);
        assert!((direct - f.eval(x, y).unwrap()).norm() < 1e-8, "({x}, {y})");
    }
    for (x, y, alpha) in [(1.0, 2.0, 1.0), (2.0, 2.0, 2.0)] {
        let p = pair(alpha, &res);
        let d = kernel_conj(x, y, alpha, &p).unwrap();
        assert!((d - factorization_kernel(x, y, alpha).unwrap()).norm() < 1e-8);
    }
}

#[test]
fn factorization_self_convergent() {
    let res = Resolution::default();
    let a = Factorization::with_resolution(1.0, &res)
        .unwrap()
        .eval(1.0, 2.0)
        .unwrap();
    let b = Factorization::with_resolution(1.0, &res.refined())
        .unwrap()
        .eval(1.0, 2.0)
        .unwrap();
    assert!((a - b).norm() < 1e-9);
}

#[test]
fn conj_kernel_identities_and_decay() {
    let p = pair(1.0, &Resolution::default());
    let k = CritKernel::from_pair(1.0, &p).unwrap();
    let v = kernel_conj(2.0, 3.0, 1.0, &p).unwrap();
    let direct = (-(2.0 - 3.0) / 2.0f64).exp() * k.eval(2.0, 3.0);
    assert!((v - direct).norm() <= 1e-10 * direct.norm());
    assert!(kernel_conj(-1.0, 1.0, 1.0, &p).is_err());

    let p2 = pair(2.0, &Resolution::default());
    let k2 = CritKernel::from_pair(2.0, &p2).unwrap();
    let xs: Vec<f64> = (1..=20).map(|v| v as f64).collect();
    let m = k2.matrix_conj(&xs, &xs);
    let mut bound: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in xs.iter().enumerate() {
            bound = bound.max(m[(i, j)].norm() * ((x + y) / 2.0).exp());
        }
    }
    assert!(bound.is_finite() && bound < 10.0, "{bound}");
    let diag: f64 = (1..=25)
        .map(|x| x as f64)
        .map(|x| k.eval_conj(x, x).norm() * x.exp())
        .fold(0.0, f64::max);
    assert!(diag.is_finite() && diag < 10.0, "{diag}");
}

#[test]
fn finite_kernel_real_and_convergent() {
    let res = Resolution::default();
    let crit = CritKernel::from_pair(1.0, &pair(1.0, &res)).unwrap().eval(0.0, 0.0).re;
    let mut errors = Vec::new();
    for n in [20, 40, 60] {
        let p = FiniteModelParams::new(n, n).unwrap();
        let k = FiniteKernel::with_resolution(p, &res).unwrap();
        let an = center_an(n, n).unwrap();
        let v = k.eval(an, an).unwrap();
        assert!(v.im.abs() <= 1e-9 * v.re.abs());
        errors.push((v.re - crit).abs() / crit);
    }
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[2] < 0.05);
}

#[test]
fn finite_kernel_self_convergent() {
    let p = FiniteModelParams::new(60, 60).unwrap();
    let an = center_an(60, 60).unwrap();
    let res = Resolution::default();
    let a = FiniteKernel::with_resolution(p, &res)
        .unwrap()
        .eval(an, an + 1.0)
        .unwrap();
    let b = FiniteKernel::with_resolution(p, &res.refined())
        .unwrap()
        .eval(an, an + 1.0)
        .unwrap();
    assert!((a - b).norm() < 1e-9, "{}", (a - b).norm());
}

#[test]
fn finite_kernel_many_factors() {
    let p = FiniteModelParams::new(60, 512).unwrap();
    let an = center_an(60, 512).unwrap();
    let v = FiniteKernel::with_resolution(p, &Resolution::default())
        .unwrap()
        .eval(an, an)
        .unwrap();
    assert!(v.re.is_finite() && v.re > 0.0);
}

#[test]
fn factor_g_against_residues() {
    let p = pair(2.0, &Resolution::default());
    let (x, q, alpha) = (1.0, 1.0, 2.0);
    let mut series = 0.0;
    let mut fact = 1.0;
    for k in 0..30 {
        if k > 0 {
            fact *= k as f64;
        }
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        series += sign / fact * (-alpha * kf * kf / 2.0 - (x + q) * (kf + 0.5)).exp();
    }
    let g = factor_g(x, q, alpha, &p.gamma).unwrap();
    assert!((g - series).norm() < 1e-10);

    let loop0 = gamma0_loop(&Geometry::default())
        .grid(16, 16, ContourLabel::Gamma)
        .unwrap();
    let v = factor_g(1.0, 1.0, 2.0, &loop0).unwrap();
    assert!((v - (-1.0f64).exp()).norm() < 1e-10);
}

#[test]
fn factor_shapes() {
    let res = Resolution::default();
    let p = pair(1.0, &res);
    // G~ is small for large q + y; resolve it on a line where the integrand decays too.
    let right = ContourPair::build(
        Geometry {
            line: 1.5,
            ..Geometry::default()
        },
        1.0,
        &res,
    )
    .unwrap();
    let mut gmax: f64 = 0.0;
    let mut gtmax: f64 = 0.0;
    for x in [1.0, 5.0, 10.0, 15.0] {
        for q in [1.0, 5.0, 10.0, 15.0] {
            let g = factor_g(x, q, 1.0, &p.gamma).unwrap();
            let gt = factor_gtilde(q, x, 1.0, &right.gamma_tilde);
            assert!(g.im.abs() <= 1e-10 * (1.0 + g.re.abs()));
            assert!(gt.im.abs() <= 1e-10 * (1.0 + gt.re.abs()));
            gmax = gmax.max(g.norm() * ((x + q) / 2.0f64).exp());
            gtmax = gtmax.max(gt.norm() * ((x + q) / 2.0f64).exp());
        }
    }
    assert!(gmax < 10.0 && gtmax < 10.0, "{gmax} {gtmax}");
    let taller = Resolution {
        line_half_height: Some(2.0 * auto_line_half_height(1.0, &Geometry::default())),
        panels: 32,
        ..res
    };
    let p2 = pair(1.0, &taller);
    let a = factor_gtilde(2.0, 1.0, 1.0, &p.gamma_tilde);
    let b = factor_gtilde(2.0, 1.0, 1.0, &p2.gamma_tilde);
    assert!((a - b).norm() < 1e-10);
}

#[test]
fn fh_orthogonality_and_jump() {
    let p = ModelParams::new(1.0, 2.0).unwrap();
    let pr = pair(1.0, &Resolution::default());
    let union = pr.union();
    for idx in (0..union.len()).step_by(union.len() / 10) {
        let (z, l) = (union.nodes[idx], union.labels[idx]);
        let (f, h) = vectors_fh(z, l, &p);
        assert!((f[0] * h[0] + f[1] * h[1]).norm() < 1e-15);
        match l {
            ContourLabel::GammaTilde => assert_eq!(f[1], Complex64::new(0.0, 0.0)),
            ContourLabel::Gamma => assert_eq!(f[0], Complex64::new(0.0, 0.0)),
        }
        let j = jump_matrix(z, l, &p);
        let tpi = two_pi_i();
        for r in 0..2 {
            for c in 0..2 {
                let id = if r == c { 1.0 } else { 0.0 };
                let rebuilt = id - tpi * f[r] * h[c];
                assert!((rebuilt - j[r][c]).norm() <= 1e-12 * (1.0 + j[r][c].norm()));
            }
        }
    }
}

#[test]
fn h_matches_a_b_composition() {
    let p = ModelParams::new(1.0, 2.0).unwrap();
    let pr = pair(1.0, &Resolution::default());
    let s = &pr.gamma_tilde.nodes;
    for (i, j) in [(10, 20), (128, 128), (200, 50)] {
        let (z, w) = (s[i], s[j]);
        let h = kernel_ha(z, w, &p, &pr.gamma).unwrap();
        let comp: Complex64 = pr
            .gamma
            .nodes
            .iter()
            .zip(&pr.gamma.weights)
            .map(|(&t, &wt)| kernel_a(z, t, &p) * kernel_b(t, w, &p) * wt)
            .sum();
        assert!((h - comp).norm() <= 1e-10 * (1.0 + h.norm()));
        let fine = pair(1.0, &Resolution::default().refined());
        let hf = kernel_ha(z, w, &p, &fine.gamma).unwrap();
        assert!((h - hf).norm() <= 1e-10 * (1.0 + h.norm()));
    }
}
