//! Monte-Carlo sampling of the largest squared singular value of a product
//! of complex Ginibre matrices.
//!
//! Trial `k` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to stream
//! `k`, so any split of the trials into shards reproduces the same samples.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::Range;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 256;
/// Stop when the Rayleigh quotient changes by less than this (relative).
const POWER_TARGET: f64 = 1e-13;
/// Required relative change if the target is not reached in time.
const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 10_000;
/// Trials per parallel shard.
const SHARD: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn new(n: usize, m: usize, trials: usize, seed: u64) -> Result<Self> {
        let cfg = McConfig { n, m, trials, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_DIM).contains(&self.n) || !(1..=MAX_DIM).contains(&self.m) {
            return Err(Error::Config(format!(
                "N = {} and M = {} must lie in [1, {MAX_DIM}]",
                self.n, self.m
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        Ok(())
    }

    /// `M / N`, for reporting.
    pub fn alpha_label(&self) -> f64 {
        self.m as f64 / self.n as f64
    }
}

/// `a_N = (M + 1)(log N - 1/(2N))`.
pub fn center_an(n: usize, m: usize) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::Config(format!("need N, M >= 1 (got N={n}, M={m})")));
    }
    let nf = n as f64;
    Ok((m as f64 + 1.0) * (nf.ln() - 0.5 / nf))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub config: McConfig,
    pub a_n: f64,
    /// `log lambda_max - a_N`, in trial order.
    pub samples: Vec<f64>,
}

/// Standard complex Gaussian: real and imaginary parts independent with variance 1/2.
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = (-u1.ln()).sqrt();
    let theta = 2.0 * PI * u2;
    Complex64::new(r * theta.cos(), r * theta.sin())
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `m` row-major `n x n` Ginibre matrices `X_1, ..., X_m`.
pub fn draw_factors<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<Vec<Complex64>> {
    (0..m)
        .map(|_| (0..n * n).map(|_| complex_gaussian(rng)).collect())
        .collect()
}

fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let row = &mut out[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a[i * n + k];
            for (o, &bkj) in row.iter_mut().zip(&b[k * n..(k + 1) * n]) {
                *o += aik * bkj;
            }
        }
    }
    out
}

/// `(P, s)` with `X_m ... X_1 = e^s P`; with `rescale` each partial product
/// is divided by its Frobenius norm, otherwise `s = 0`.
pub fn product(factors: &[Vec<Complex64>], n: usize, rescale: bool) -> (Vec<Complex64>, f64) {
    let mut p: Vec<Complex64> = (0..n * n)
        .map(|k| Complex64::new(if k % (n + 1) == 0 { 1.0 } else { 0.0 }, 0.0))
        .collect();
    let mut log_scale = 0.0;
    for x in factors {
        p = matmul(x, &p, n);
        if rescale {
            let frob = p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut p {
                *z /= frob;
            }
            log_scale += frob.ln();
        }
    }
    (p, log_scale)
}

/// `P* P`.
pub fn gram(p: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..n {
        let row = &p[k * n..(k + 1) * n];
        for i in 0..n {
            let c = row[i].conj();
            for j in 0..n {
                h[i * n + j] += c * row[j];
            }
        }
    }
    h
}

/// Largest eigenvalue of a Hermitian positive semidefinite matrix by power iteration.
pub fn power_iteration(h: &[Complex64], n: usize) -> Result<f64> {
    // Start from a fixed vector with all components nonzero.
    let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0, 0.1 * i as f64)).collect();
    let mut lambda = 0.0;
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut change = f64::INFINITY;
    for _ in 0..POWER_MAX_ITER {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= norm;
        }
        for i in 0..n {
            w[i] = h[i * n..(i + 1) * n].iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let next: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        std::mem::swap(&mut v, &mut w);
        change = (next - lambda).abs() / next.abs();
        lambda = next;
        if change <= POWER_TARGET {
            return Ok(lambda);
        }
    }
    if change <= POWER_TOL {
        Ok(lambda)
    } else {
        Err(Error::Convergence {
            iterations: POWER_MAX_ITER,
        })
    }
}

/// All eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(h: &[Complex64], n: usize) -> Vec<f64> {
    let mut a = h.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.norm() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // A <- J^H A J with J = diag(1, e^{-i phi}) R(theta) on (p, q).
                let e = apq / apq.norm();
                let ec = e.conj();
                let theta = 0.5 * (2.0 * apq.norm()).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * ec * akq;
                    a[k * n + q] = s * akp + c * ec * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * e * aqk;
                    a[q * n + k] = s * apk + c * e * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `log lambda_max(Pi* Pi)` for one set of factors.
pub fn top_log_eigenvalue(factors: &[Vec<Complex64>], n: usize, rescale: bool) -> Result<f64> {
    let (p, s) = product(factors, n, rescale);
    let lambda = power_iteration(&gram(&p, n), n)?;
    Ok(lambda.ln() + 2.0 * s)
}

/// Centered samples for trials `range`.
pub fn sample_range(cfg: &McConfig, range: Range<usize>) -> Result<Vec<f64>> {
    let a_n = center_an(cfg.n, cfg.m)?;
    range
        .map(|k| {
            let mut rng = trial_rng(cfg.seed, k as u64);
            let factors = draw_factors(&mut rng, cfg.n, cfg.m);
            Ok(top_log_eigenvalue(&factors, cfg.n, true)? - a_n)
        })
        .collect()
}

/// All trials, sharded across the rayon pool.
pub fn sample_rightmost(cfg: &McConfig) -> Result<McResult> {
    cfg.validate()?;
    let shards: Vec<Range<usize>> = (0..cfg.trials.div_ceil(SHARD))
        .map(|s| s * SHARD..((s + 1) * SHARD).min(cfg.trials))
        .collect();
    let parts = shards
        .into_par_iter()
        .map(|r| sample_range(cfg, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(McResult {
        config: *cfg,
        a_n: center_an(cfg.n, cfg.m)?,
        samples: parts.concat(),
    })
}

/// `(phat, ci95)` with `phat` the fraction of samples `<= a`.
pub fn empirical_gap(result: &McResult, a: f64) -> (f64, f64) {
    let n = result.samples.len() as f64;
    if n == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let phat = result.samples.iter().filter(|&&x| x <= a).count() as f64 / n;
    (phat, 1.96 * (phat * (1.0 - phat) / n).sqrt())
}

/// Kolmogorov-Smirnov distance between the samples and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// CDF of `log E`, `E` exponential with mean 1.
pub fn log_exponential_cdf(y: f64) -> f64 {
    -(-y.exp()).exp_m1()
}

/// 1% critical value of the KS distance.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Samples as CSV: config comment lines, then `x` sorted ascending.
pub fn samples_csv(result: &McResult) -> String {
    let c = &result.config;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# N={},M={},trials={},seed={},alpha={}",
        c.n,
        c.m,
        c.trials,
        c.seed,
        c.alpha_label()
    );
    let _ = writeln!(s, "# a_N={:.16e}", result.a_n);
    s.push_str("x\n");
    let mut v = result.samples.clone();
    v.sort_by(f64::total_cmp);
    for x in v {
        let _ = writeln!(s, "{x:.16e}");
    }
    s
}

/// Empirical quantile by linear interpolation of the order statistics.
pub fn quantile(samples: &[f64], q: f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    if s.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    s[lo] + (pos - lo as f64) * (s[hi] - s[lo])
}
