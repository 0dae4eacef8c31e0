//! Residue matrix `Y1(a)` of the Riemann-Hilbert problem, the function
//! `u = -(Y1)_12 (Y1)_21`, the reconstruction of `log P` from `u`, and the
//! right-tail asymptotic formulas.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{deformed_contours, gamma_contour_integral, ContourPair, Geometry, Resolution};
use crate::error::{Error, Result};
use crate::fredholm::{fh_on_grid, qa_operator, resolve};
use crate::kernels::ModelParams;
use crate::quadrature::{composite_interval, composite_on_breaks};
use crate::special::log_gamma;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Y1Matrix {
    pub e11: Complex64,
    pub e12: Complex64,
    pub e21: Complex64,
    pub e22: Complex64,
    pub a: f64,
    pub alpha: f64,
}

impl Y1Matrix {
    /// `u = -(Y1)_12 (Y1)_21`.
    pub fn u(&self) -> Complex64 {
        -self.e12 * self.e21
    }
}

/// `Y1 = int F h^T` with `F_j = (I - Q_a)^{-1} f_j`, on the given contour pair.
pub fn y1_matrix_on(a: f64, alpha: f64, pair: &ContourPair) -> Result<Y1Matrix> {
    if !(a > 0.0) {
        return Err(Error::Domain {
            op: "y1_matrix",
            detail: format!("a = {a} must be positive"),
        });
    }
    let p = ModelParams::new(alpha, a)?;
    let union = pair.union();
    let q = qa_operator(&p, &union);
    let (f, h) = fh_on_grid(&union, &p);
    let rhs: Vec<Vec<Complex64>> = (0..2).map(|k| f.iter().map(|v| v[k]).collect()).collect();
    let big_f = resolve(&q, &rhs)?;
    let entry = |k: usize, l: usize| -> Complex64 {
        union
            .weights
            .iter()
            .zip(&big_f[k])
            .zip(&h)
            .map(|((w, fk), hv)| w * fk * hv[l])
            .sum()
    };
    Ok(Y1Matrix {
        e11: entry(0, 0),
        e12: entry(0, 1),
        e21: entry(1, 0),
        e22: entry(1, 1),
        a,
        alpha,
    })
}

/// Contours for `Y1(a)`: through the saddle `a/alpha` once it lies right of 1,
/// where `u` is small and the default pair only resolves it to absolute
/// precision; the default pair otherwise.
pub fn y1_geometry(a: f64, alpha: f64) -> Geometry {
    if a > alpha {
        if let Ok(g) = Geometry::deformed(alpha, a) {
            if g.validate().is_ok() {
                return g;
            }
        }
    }
    Geometry::default()
}

/// `Y1(a)` on the contours chosen by [`y1_geometry`].
pub fn y1_matrix(a: f64, alpha: f64, res: &Resolution) -> Result<Y1Matrix> {
    y1_matrix_on(a, alpha, &ContourPair::build(y1_geometry(a, alpha), alpha, res)?)
}

/// `u(x)` together with its asymptotic prediction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UValue {
    pub x: f64,
    pub u: f64,
    pub u_imag: f64,
    pub u_asym: f64,
}

pub fn u_of_x(x: f64, alpha: f64, res: &Resolution) -> Result<UValue> {
    let y = y1_matrix(x, alpha, res)?;
    let u = y.u();
    Ok(UValue {
        x,
        u: u.re,
        u_imag: u.im,
        u_asym: u_asymptotic(x, alpha)?,
    })
}

/// `log` of the leading right-tail term of `u`.
pub fn log_u_asymptotic(x: f64, alpha: f64) -> Result<f64> {
    if !(x > 0.0 && alpha > 0.0) {
        return Err(Error::Domain {
            op: "u_asymptotic",
            detail: format!("x = {x}, alpha = {alpha}"),
        });
    }
    let l = (x / alpha).ln();
    let lg = log_gamma(Complex64::new(x / alpha, 0.0))?.re;
    Ok(-(x * x + l * l) / (2.0 * alpha) - lg - 0.5 * (2.0 * PI * alpha).ln())
}

/// `exp(-(x^2 + log^2(x/alpha)) / (2 alpha)) / (Gamma(x/alpha) sqrt(2 pi alpha))`.
pub fn u_asymptotic(x: f64, alpha: f64) -> Result<f64> {
    Ok(log_u_asymptotic(x, alpha)?.exp())
}

/// `u` tabulated on a composite Gauss-Legendre grid whose panel breaks
/// include every requested gap endpoint, so one sweep serves all of them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UCurve {
    pub alpha: f64,
    pub breaks: Vec<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub u: Vec<f64>,
}

/// The `u` integral is cut where `log u_asym` is below this and has also
/// dropped by [`U_TAIL_DROP`] from its value at the last endpoint.
const U_TAIL_LOG: f64 = -45.0;
const U_TAIL_DROP: f64 = 40.0;

/// Right end of the `u` integration: where the asymptotic `u` has become negligible.
pub fn u_cutoff(alpha: f64, from: f64) -> f64 {
    let start = from.max(1.0);
    let level = log_u_asymptotic(start, alpha)
        .map(|v| (v - U_TAIL_DROP).min(U_TAIL_LOG))
        .unwrap_or(U_TAIL_LOG);
    let mut x = start;
    while log_u_asymptotic(x, alpha).map(|v| v > level).unwrap_or(false) && x < from + 60.0 {
        x += 0.5;
    }
    x
}

impl UCurve {
    /// Panels between consecutive `endpoints`, then geometrically longer
    /// panels up to the cutoff; `order` nodes each.
    pub fn tabulate(alpha: f64, endpoints: &[f64], order: usize, res: &Resolution) -> Result<Self> {
        let mut breaks: Vec<f64> = endpoints.to_vec();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let first = *breaks.first().ok_or_else(|| Error::Config("no endpoints".into()))?;
        if !(first > 0.0) {
            return Err(Error::Domain {
                op: "UCurve",
                detail: format!("endpoint {first} must be positive"),
            });
        }
        let last = *breaks.last().unwrap();
        let end = u_cutoff(alpha, last);
        let mut x = last;
        let mut h = 1.0;
        while x < end {
            x = (x + h).min(end);
            breaks.push(x);
            h *= 1.5;
        }
        let (nodes, weights) = composite_on_breaks(&breaks, order);
        let u = nodes
            .par_iter()
            .map(|&x| y1_matrix(x, alpha, res).map(|y| y.u().re))
            .collect::<Result<Vec<_>>>()?;
        Ok(UCurve {
            alpha,
            breaks,
            nodes,
            weights,
            u,
        })
    }

    /// `-int_a^inf (x - a) u(x) dx`; `a` must be one of the tabulated breaks.
    pub fn log_gap(&self, a: f64) -> Result<f64> {
        if !self.breaks.iter().any(|&b| (b - a).abs() < 1e-12) {
            return Err(Error::Config(format!(
                "a = {a} is not a panel break of the tabulated curve"
            )));
        }
        Ok(log_gap_from_u(a, &self.nodes, &self.weights, &self.u))
    }
}

/// `-sum w_i (x_i - a) u_i` over the nodes with `x_i > a`.
pub fn log_gap_from_u(a: f64, nodes: &[f64], weights: &[f64], u: &[f64]) -> f64 {
    -nodes
        .iter()
        .zip(weights)
        .zip(u)
        .filter(|((&x, _), _)| x > a)
        .map(|((&x, &w), &u)| w * (x - a) * u)
        .sum::<f64>()
}

/// `sum_k (-1)^k / k! exp(-alpha k^2 / 2 - a k)`, summed until terms are negligible.
pub fn residue_sum(alpha: f64, a: f64) -> f64 {
    let mut s = 0.0;
    let mut log_fact = 0.0;
    for k in 0..200 {
        let kf = k as f64;
        if k > 0 {
            log_fact += kf.ln();
        }
        let log_term = -0.5 * alpha * kf * kf - a * kf - log_fact;
        let term = log_term.exp();
        s += if k % 2 == 0 { term } else { -term };
        if k > 2 && log_term < -745.0 {
            break;
        }
    }
    s
}

/// `(i alpha / a) exp(-a^2 / (4 alpha)) S(a)` with `S` the residue sum.
pub fn asym_u1_21_residue(a: f64, alpha: f64) -> Complex64 {
    Complex64::new(0.0, alpha / a) * (-a * a / (4.0 * alpha)).exp() * residue_sum(alpha, a)
}

/// The same quantity with `S` replaced by the contour integral over the
/// hairpin deformed to cross at `1/(alpha a)`.
pub fn asym_u1_21(a: f64, alpha: f64, res: &Resolution) -> Result<Complex64> {
    let arm = res
        .arm_length
        .unwrap_or_else(|| crate::contour::auto_arm_length(alpha, &Geometry::deformed(alpha, a).unwrap_or_default()));
    let (gamma, _) = deformed_contours(alpha, a, arm, res.panels, res.order)?;
    let s = gamma_contour_integral(alpha, a, &gamma);
    Ok(Complex64::new(0.0, alpha / a) * (-a * a / (4.0 * alpha)).exp() * s)
}

/// Value with a log-magnitude channel for results below double range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogScaled {
    pub value: Complex64,
    /// `log` of the value (principal branch).
    pub log: Complex64,
    pub underflow: bool,
}

/// `(1/2 pi i) int_R exp(-log Gamma((a/alpha)(1 - i x)) - (a^2/(2 alpha))(x^2 + 1/2)) dx`.
///
/// The real line is cut at `|x| <= x_max`, widened if the Gaussian factor
/// has not yet decayed there.
pub fn asym_u1_12_truncated(a: f64, alpha: f64, x_max: f64) -> Result<LogScaled> {
    if !(a > 0.0 && alpha > 0.0) {
        return Err(Error::Domain {
            op: "asym_u1_12",
            detail: format!("a = {a}, alpha = {alpha}"),
        });
    }
    let c = a / alpha;
    let g = a * a / (2.0 * alpha);
    let exponent = |x: f64| -> Result<Complex64> { Ok(-log_gamma(Complex64::new(c, -c * x))? - g * (x * x + 0.5)) };
    let peak = exponent(0.0)?.re;
    let (nodes, weights) = composite_interval(-x_max, x_max, 32, 16);
    let mut sum = Complex64::new(0.0, 0.0);
    for (&x, &w) in nodes.iter().zip(&weights) {
        sum += w * (exponent(x)? - peak).exp();
    }
    let log = sum.ln() + peak - Complex64::new(0.0, 2.0 * PI).ln();
    let value = log.exp();
    Ok(LogScaled {
        value,
        log,
        underflow: log.re < -700.0,
    })
}

/// Half-width beyond which the `asym_u1_12` integrand is below `e^-40` of its peak.
pub fn asym_u1_12_width(a: f64, alpha: f64) -> f64 {
    let c = a / alpha;
    let g = a * a / (2.0 * alpha);
    // |1/Gamma(c(1 - ix))| grows at most like exp(pi c |x| / 2)
    let b = 0.5 * PI * c;
    let x = (b + (b * b + 4.0 * g * 40.0).sqrt()) / (2.0 * g);
    x.max(8.0)
}

pub fn asym_u1_12(a: f64, alpha: f64) -> Result<LogScaled> {
    asym_u1_12_truncated(a, alpha, asym_u1_12_width(a, alpha))
}

/// `exp(-(a^2 + 2 log^2(a/alpha)) / (4 alpha)) / (i sqrt(2 pi alpha) Gamma(1 + a/alpha))`.
pub fn asym_u1_12_closed(a: f64, alpha: f64) -> Result<Complex64> {
    let l = (a / alpha).ln();
    let lg = log_gamma(Complex64::new(1.0 + a / alpha, 0.0))?.re;
    let m = (-(a * a + 2.0 * l * l) / (4.0 * alpha) - lg).exp() / (2.0 * PI * alpha).sqrt();
    Ok(Complex64::new(0.0, -m))
}

/// `u ≈ (a^2/alpha^2) (U1)_12 (U1)_21` from the two asymptotic integrals.
pub fn u_asym_composed(a: f64, alpha: f64, res: &Resolution) -> Result<f64> {
    let u12 = asym_u1_12(a, alpha)?;
    let u21 = asym_u1_21(a, alpha, res)?;
    Ok(((a * a) / (alpha * alpha) * u12.value * u21).re)
}
