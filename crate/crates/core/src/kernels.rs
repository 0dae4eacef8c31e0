//! Correlation kernels of the critical process and the auxiliary kernels
//! used to rewrite its gap probability.
//!
//! Contour integrals are evaluated by direct quadrature on [`QuadratureGrid`]s.
//! Factors that depend only on the node are computed once per grid, so the
//! double integral for `K_crit` collapses to a pair of matrix products.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{ContourLabel, ContourPair, ContourSpec, Geometry, QuadratureGrid, Resolution};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quadrature::composite_interval;
use crate::special::{gamma, log_gamma, recip_gamma};

/// `2 pi i`.
pub fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

/// Limit ratio `alpha = lim M/N` and gap endpoint `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub a: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, a: f64) -> Result<Self> {
        if !(alpha > 0.0) || !a.is_finite() {
            return Err(Error::Domain {
                op: "ModelParams",
                detail: format!("alpha = {alpha}, a = {a}"),
            });
        }
        Ok(ModelParams { alpha, a })
    }
}

/// Matrix size `n` and number of factors `m` of the finite product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteModelParams {
    pub n: usize,
    pub m: usize,
}

impl FiniteModelParams {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Config(format!("need N, M >= 1 (got N={n}, M={m})")));
        }
        Ok(FiniteModelParams { n, m })
    }
}

/// Node-wise factors of the critical kernel on a fixed contour pair.
///
/// `t_factor[j] = w_j Gamma(t_j) exp(-alpha t_j^2 / 2)` on `gamma` and
/// `s_factor[i] = w_i exp(alpha s_i^2 / 2) / Gamma(s_i)` on `gamma_tilde`.
#[derive(Clone, Debug)]
pub struct CritKernel {
    pub alpha: f64,
    t_nodes: Vec<Complex64>,
    t_factor: Vec<Complex64>,
    s_nodes: Vec<Complex64>,
    s_factor: Vec<Complex64>,
    /// `coupling[j][i] = 1 / (s_i - t_j)`.
    coupling: CMatrix,
}

impl CritKernel {
    pub fn new(alpha: f64, gamma_grid: &QuadratureGrid, gamma_tilde: &QuadratureGrid) -> Result<Self> {
        let mut t_factor = Vec::with_capacity(gamma_grid.len());
        for (&t, &w) in gamma_grid.nodes.iter().zip(&gamma_grid.weights) {
            t_factor.push(w * gamma(t)? * (-0.5 * alpha * t * t).exp());
        }
        let s_factor = gamma_tilde
            .nodes
            .iter()
            .zip(&gamma_tilde.weights)
            .map(|(&s, &w)| w * recip_gamma(s) * (0.5 * alpha * s * s).exp())
            .collect();
        let t_nodes = gamma_grid.nodes.clone();
        let s_nodes = gamma_tilde.nodes.clone();
        let coupling = CMatrix::from_fn(t_nodes.len(), s_nodes.len(), |j, i| 1.0 / (s_nodes[i] - t_nodes[j]));
        Ok(CritKernel {
            alpha,
            t_nodes,
            t_factor,
            s_nodes,
            s_factor,
            coupling,
        })
    }

    pub fn from_pair(alpha: f64, pair: &ContourPair) -> Result<Self> {
        Self::new(alpha, &pair.gamma, &pair.gamma_tilde)
    }

    /// `K_crit(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let m = self.matrix(&[x], &[y]);
        m[(0, 0)]
    }

    /// `K(x, y) = exp(-(x - y)/2) K_crit(x, y)`.
    pub fn eval_conj(&self, x: f64, y: f64) -> Complex64 {
        (-(x - y) / 2.0).exp() * self.eval(x, y)
    }

    /// `K_crit(xs[i], ys[j])` for all pairs.
    pub fn matrix(&self, xs: &[f64], ys: &[f64]) -> CMatrix {
        let left = CMatrix::from_fn(xs.len(), self.t_nodes.len(), |i, j| {
            self.t_factor[j] * (xs[i] * self.t_nodes[j]).exp()
        });
        let norm = 1.0 / (two_pi_i() * two_pi_i());
        let right = CMatrix::from_fn(self.s_nodes.len(), ys.len(), |i, j| {
            norm * self.s_factor[i] * (-ys[j] * self.s_nodes[i]).exp()
        });
        left.matmul(&self.coupling).matmul(&right)
    }

    /// Conjugated kernel `exp(-(x - y)/2) K_crit(x, y)` on a node set.
    pub fn matrix_conj(&self, xs: &[f64], ys: &[f64]) -> CMatrix {
        let mut m = self.matrix(xs, ys);
        let rows: Vec<Complex64> = xs.iter().map(|x| Complex64::new((-x / 2.0).exp(), 0.0)).collect();
        let cols: Vec<Complex64> = ys.iter().map(|y| Complex64::new((y / 2.0).exp(), 0.0)).collect();
        m.scale_rows(&rows);
        m.scale_columns(&cols);
        m
    }
}

/// `K_crit(x, y)` on the given contour pair.
pub fn kernel_crit(
    x: f64,
    y: f64,
    alpha: f64,
    gamma_grid: &QuadratureGrid,
    gamma_tilde: &QuadratureGrid,
) -> Result<Complex64> {
    Ok(CritKernel::new(alpha, gamma_grid, gamma_tilde)?.eval(x, y))
}

/// Conjugated kernel `K(x, y)` for `x, y > 0`.
pub fn kernel_conj(x: f64, y: f64, alpha: f64, pair: &ContourPair) -> Result<Complex64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain {
            op: "kernel_conj",
            detail: format!("x = {x}, y = {y} must be positive"),
        });
    }
    Ok(CritKernel::from_pair(alpha, pair)?.eval_conj(x, y))
}

/// Largest exponent accepted after the log-scale cancellation.
const MAX_EXPONENT: f64 = 700.0;

/// Finite-`N` kernel of `log(Pi* Pi)` eigenvalues for a product of `M`
/// Ginibre matrices of size `N`.
///
/// The Gamma ratios raised to the power `M + 1` are carried in log space,
/// normalized by `log Gamma(N)` so that the two contour factors stay O(1)
/// after the `a_N` shift.
#[derive(Clone, Debug)]
pub struct FiniteKernel {
    pub params: FiniteModelParams,
    t_nodes: Vec<Complex64>,
    t_weights: Vec<Complex64>,
    t_log: Vec<Complex64>,
    s_nodes: Vec<Complex64>,
    s_weights: Vec<Complex64>,
    s_log: Vec<Complex64>,
}

impl FiniteKernel {
    pub fn new(params: FiniteModelParams, gamma_grid: &QuadratureGrid, gamma_tilde: &QuadratureGrid) -> Result<Self> {
        let n = params.n as f64;
        let power = params.m as f64 + 1.0;
        let norm = log_gamma(Complex64::new(n, 0.0))?;
        let mut t_log = Vec::with_capacity(gamma_grid.len());
        for &t in &gamma_grid.nodes {
            if t.re + n <= 0.0 {
                return Err(Error::Geometry(format!("node {t} lies left of -N")));
            }
            let g = gamma(t)?;
            t_log.push(g.ln() - power * (log_gamma(t + n)? - norm));
        }
        let mut s_log = Vec::with_capacity(gamma_tilde.len());
        for &s in &gamma_tilde.nodes {
            s_log.push(power * (log_gamma(s + n)? - norm) - gamma(s)?.ln());
        }
        Ok(FiniteKernel {
            params,
            t_nodes: gamma_grid.nodes.clone(),
            t_weights: gamma_grid.weights.clone(),
            t_log,
            s_nodes: gamma_tilde.nodes.clone(),
            s_weights: gamma_tilde.weights.clone(),
            s_log,
        })
    }

    /// Closed hairpin around `0, -1, ..., -N+1` and the default line.
    pub fn with_resolution(params: FiniteModelParams, res: &Resolution) -> Result<Self> {
        let g = Geometry::default();
        let mut hairpin = ContourSpec::hairpin(g.half_width, g.nose, 1.0);
        hairpin.closed_at = Some(-(params.n as f64) + 0.5);
        let gamma_grid = hairpin.grid(res.panels, res.order, ContourLabel::Gamma)?;
        let alpha_eff = params.m as f64 / params.n as f64;
        let height = res
            .line_half_height
            .unwrap_or_else(|| crate::contour::auto_line_half_height(alpha_eff, &g));
        let line = ContourSpec::vertical(g.line, height).grid(res.panels, res.order, ContourLabel::GammaTilde)?;
        Self::new(params, &gamma_grid, &line)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<Complex64> {
        let mut t_terms = Vec::with_capacity(self.t_nodes.len());
        for ((&t, &w), &l) in self.t_nodes.iter().zip(&self.t_weights).zip(&self.t_log) {
            let e = l + x * t;
            if e.re > MAX_EXPONENT {
                return Err(Error::Overflow { exponent: e.re });
            }
            t_terms.push(w * e.exp());
        }
        let mut total = Complex64::new(0.0, 0.0);
        for ((&s, &w), &l) in self.s_nodes.iter().zip(&self.s_weights).zip(&self.s_log) {
            let e = l - y * s;
            if e.re > MAX_EXPONENT {
                return Err(Error::Overflow { exponent: e.re });
            }
            let inner: Complex64 = t_terms.iter().zip(&self.t_nodes).map(|(&v, &t)| v / (s - t)).sum();
            total += w * e.exp() * inner;
        }
        Ok(total / (two_pi_i() * two_pi_i()))
    }
}

/// Finite-`N` kernel on the given contours.
pub fn kernel_finite(
    x: f64,
    y: f64,
    params: FiniteModelParams,
    gamma_grid: &QuadratureGrid,
    gamma_tilde: &QuadratureGrid,
) -> Result<Complex64> {
    FiniteKernel::new(params, gamma_grid, gamma_tilde)?.eval(x, y)
}

/// `G(x, q) = (1/2 pi i) int_gamma Gamma(t) exp(-alpha t^2/2 + (x+q)(t - 1/2)) dt`.
pub fn factor_g(x: f64, q: f64, alpha: f64, gamma_grid: &QuadratureGrid) -> Result<Complex64> {
    let xq = x + q;
    let mut s = Complex64::new(0.0, 0.0);
    for (&t, &w) in gamma_grid.nodes.iter().zip(&gamma_grid.weights) {
        s += w * gamma(t)? * (-0.5 * alpha * t * t + xq * (t - 0.5)).exp();
    }
    Ok(s / two_pi_i())
}

/// `G~(q, y) = (1/2 pi i) int_gamma~ exp(alpha s^2/2 - (y+q)(s - 1/2)) / Gamma(s) ds`.
pub fn factor_gtilde(q: f64, y: f64, alpha: f64, gamma_tilde: &QuadratureGrid) -> Complex64 {
    let yq = y + q;
    gamma_tilde.integrate(|s| recip_gamma(s) * (0.5 * alpha * s * s - yq * (s - 0.5)).exp()) / two_pi_i()
}

/// Closed loop around the pole at 0 only: the part of the hairpin right of
/// `Re t = -1/2`, closed by a downward segment there.
pub fn gamma0_loop(geometry: &Geometry) -> ContourSpec {
    let mut spec = ContourSpec::hairpin(geometry.half_width, geometry.nose, 1.0);
    spec.closed_at = Some(-0.5);
    spec
}

const FACTOR_LINE: f64 = 1.5;

/// `K(x, y) = int_0^inf G(x, q) G~(q, y) dq` by Gauss-Legendre after the
/// substitution `q = -2 log(1 - u)`.
#[derive(Clone, Debug)]
pub struct Factorization {
    alpha: f64,
    pair: ContourPair,
    u_nodes: Vec<f64>,
    u_weights: Vec<f64>,
}

impl Factorization {
    pub fn new(alpha: f64, pair: ContourPair, panels: usize, order: usize) -> Self {
        let (u_nodes, u_weights) = composite_interval(0.0, 1.0, panels, order);
        Factorization {
            alpha,
            pair,
            u_nodes,
            u_weights,
        }
    }

    pub fn with_resolution(alpha: f64, res: &Resolution) -> Result<Self> {
        // Moving the line right of 1/2 makes G~ decay in q.
        let geometry = Geometry {
            line: FACTOR_LINE,
            ..Geometry::default()
        };
        Ok(Self::new(
            alpha,
            ContourPair::build(geometry, alpha, res)?,
            4,
            res.order.max(16),
        ))
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (&u, &w) in self.u_nodes.iter().zip(&self.u_weights) {
            let q = -2.0 * (1.0 - u).ln();
            let jac = 2.0 / (1.0 - u);
            let g = factor_g(x, q, self.alpha, &self.pair.gamma)?;
            let gt = factor_gtilde(q, y, self.alpha, &self.pair.gamma_tilde);
            total += w * jac * g * gt;
        }
        Ok(total)
    }
}

/// `K(x, y)` through the factorization `G G~`, default geometry.
pub fn factorization_kernel(x: f64, y: f64, alpha: f64) -> Result<Complex64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain {
            op: "factorization_kernel",
            detail: format!("x = {x}, y = {y} must be positive"),
        });
    }
    Factorization::with_resolution(alpha, &Resolution::default())?.eval(x, y)
}

/// The vectors `f(z)` and `h(z)` of the integrable form of `Q_a`.
pub fn vectors_fh(z: Complex64, label: ContourLabel, p: &ModelParams) -> ([Complex64; 2], [Complex64; 2]) {
    let zero = Complex64::new(0.0, 0.0);
    let q = 0.25 * p.alpha * z * z;
    match label {
        ContourLabel::GammaTilde => {
            let f1 = (q - p.a * z).exp() / two_pi_i();
            let h2 = -recip_gamma(z) * q.exp();
            ([f1, zero], [zero, h2])
        }
        ContourLabel::Gamma => {
            let f2 = (-q).exp() / two_pi_i();
            let h1 = gamma(z).expect("gamma contour avoids poles") * (-q + p.a * z).exp();
            ([zero, f2], [h1, zero])
        }
    }
}

/// Integrable kernel `Q_a(x, y)` on `gamma ∪ gamma_tilde`.
pub fn kernel_qa(x: Complex64, y: Complex64, labels: (ContourLabel, ContourLabel), p: &ModelParams) -> Complex64 {
    use ContourLabel::*;
    let (alpha, a) = (p.alpha, p.a);
    match labels {
        (GammaTilde, Gamma) => {
            gamma(y).expect("gamma contour avoids poles") * (0.25 * alpha * (x * x - y * y) - a * (x - y)).exp()
                / (two_pi_i() * (x - y))
        }
        (Gamma, GammaTilde) => -recip_gamma(y) * (-0.25 * alpha * (x * x - y * y)).exp() / (two_pi_i() * (x - y)),
        _ => Complex64::new(0.0, 0.0),
    }
}

/// `A_a(z, t)`, `z` on `gamma_tilde`, `t` on `gamma`.
pub fn kernel_a(z: Complex64, t: Complex64, p: &ModelParams) -> Complex64 {
    gamma(t).expect("gamma contour avoids poles") / two_pi_i() * (-p.a * (z - t)).exp() / (z - t)
        * (0.25 * p.alpha * (z * z - t * t)).exp()
}

/// `B(t, s)`, `t` on `gamma`, `s` on `gamma_tilde`.
pub fn kernel_b(t: Complex64, s: Complex64, p: &ModelParams) -> Complex64 {
    recip_gamma(s) / (two_pi_i() * (s - t)) * (0.25 * p.alpha * (s * s - t * t)).exp()
}

/// `H_a(z, s)` on `gamma_tilde` by quadrature of its defining integral over `gamma`.
pub fn kernel_ha(z: Complex64, s: Complex64, p: &ModelParams, gamma_grid: &QuadratureGrid) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for (&t, &w) in gamma_grid.nodes.iter().zip(&gamma_grid.weights) {
        sum += w * (p.a * (t - z)).exp() / ((s - t) * (z - t))
            * gamma(t)?
            * (0.25 * p.alpha * (z * z + s * s - 2.0 * t * t)).exp();
    }
    Ok(-sum * recip_gamma(s) / (4.0 * PI * PI))
}

/// Jump matrix of the Riemann-Hilbert problem at a contour point.
pub fn jump_matrix(z: Complex64, label: ContourLabel, p: &ModelParams) -> [[Complex64; 2]; 2] {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let e = 0.5 * p.alpha * z * z - p.a * z;
    match label {
        ContourLabel::GammaTilde => [[one, recip_gamma(z) * e.exp()], [zero, one]],
        ContourLabel::Gamma => [[one, zero], [-gamma(z).expect("off poles") * (-e).exp(), one]],
    }
}
