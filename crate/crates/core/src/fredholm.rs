//! Nyström discretization of integral operators and their Fredholm
//! determinants, on half-lines and on the contour union `gamma_tilde ∪ gamma`.

use std::sync::atomic::{AtomicBool, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{ContourLabel, ContourPair, ContourSpec, Geometry, QuadratureGrid, Resolution};
use crate::error::{Error, Result};
use crate::kernels::{vectors_fh, CritKernel, ModelParams};
use crate::linalg::{CMatrix, Lu};
use crate::quadrature::composite_interval;

/// Pivot magnitude below which a determinant is flagged as numerically singular.
pub const SINGULAR_PIVOT: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// `sqrt(w_i) K(x_i, x_j) sqrt(w_j)`.
    Symmetric,
    /// `K(x_i, x_j) w_j`.
    RightWeight,
}

/// Dense Nyström matrix of an integral operator.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub matrix: CMatrix,
    pub weighting: Weighting,
}

impl DiscreteOperator {
    /// `matrix[i][j] = kernel(i, j)` times the weights of `weighting`.
    ///
    /// Rows are evaluated in parallel; the first kernel error is returned.
    pub fn assemble<F>(
        kernel: F,
        row_weights: &[Complex64],
        col_weights: &[Complex64],
        weighting: Weighting,
    ) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<Complex64> + Sync,
    {
        let (n, m) = (row_weights.len(), col_weights.len());
        let rows: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|i| (0..m).map(|j| kernel(i, j)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let matrix = CMatrix::from_fn(n, m, |i, j| rows[i][j]);
        Ok(Self::from_kernel_matrix(matrix, row_weights, col_weights, weighting))
    }

    /// Apply quadrature weights to precomputed kernel values.
    pub fn from_kernel_matrix(
        mut matrix: CMatrix,
        row_weights: &[Complex64],
        col_weights: &[Complex64],
        weighting: Weighting,
    ) -> Self {
        match weighting {
            Weighting::RightWeight => matrix.scale_columns(col_weights),
            Weighting::Symmetric => {
                let r: Vec<Complex64> = row_weights.iter().map(|w| w.sqrt()).collect();
                let c: Vec<Complex64> = col_weights.iter().map(|w| w.sqrt()).collect();
                matrix.scale_rows(&r);
                matrix.scale_columns(&c);
            }
        }
        DiscreteOperator { matrix, weighting }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// `det(I - A)` with its logarithm and pivot diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Determinant {
    pub value: Complex64,
    pub log: Complex64,
    pub min_pivot: f64,
    pub singular_warning: bool,
}

pub fn det_i_minus(a: &DiscreteOperator) -> Determinant {
    if a.dim() == 0 {
        return Determinant {
            value: Complex64::new(1.0, 0.0),
            log: Complex64::new(0.0, 0.0),
            min_pivot: f64::INFINITY,
            singular_warning: false,
        };
    }
    let lu = Lu::new(a.matrix.identity_minus());
    Determinant {
        value: lu.det(),
        log: lu.log_det(),
        min_pivot: lu.min_pivot(),
        singular_warning: lu.min_pivot() < SINGULAR_PIVOT,
    }
}

/// Solve `(I - A) x = rhs` for each right-hand side.
pub fn resolve(a: &DiscreteOperator, rhs: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let m = a.matrix.identity_minus();
    let lu = Lu::new(m.clone());
    if lu.min_pivot() < SINGULAR_PIVOT {
        return Err(Error::Singular {
            pivot: lu.min_pivot(),
            column: lu.min_pivot_column(),
        });
    }
    let mut out = Vec::with_capacity(rhs.len());
    for b in rhs {
        let x = lu.solve(b);
        let r = m.mul_vec(&x);
        let residual = r.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(residual <= 1e-10 * (1.0 + scale)) {
            return Err(Error::Singular {
                pivot: lu.min_pivot(),
                column: lu.min_pivot_column(),
            });
        }
        out.push(x);
    }
    Ok(out)
}

pub fn trace(a: &DiscreteOperator) -> Complex64 {
    a.matrix.trace()
}

/// Composite Gauss-Legendre nodes on `(a, a + L)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HalfLineGrid {
    pub a: f64,
    pub length: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HalfLineGrid {
    pub fn new(a: f64, length: f64, panels: usize, order: usize) -> Self {
        let (nodes, weights) = composite_interval(a, a + length, panels, order);
        HalfLineGrid {
            a,
            length,
            nodes,
            weights,
        }
    }

    pub fn from_resolution(a: f64, res: &Resolution) -> Self {
        Self::new(a, res.halfline_length, res.halfline_panels, res.halfline_order)
    }

    pub fn complex_weights(&self) -> Vec<Complex64> {
        self.weights.iter().map(|&w| Complex64::new(w, 0.0)).collect()
    }
}

/// `chi_(a, a+L) K chi_(a, a+L)` with the conjugated critical kernel.
pub fn halfline_operator(kernel: &CritKernel, grid: &HalfLineGrid, weighting: Weighting) -> DiscreteOperator {
    let m = kernel.matrix_conj(&grid.nodes, &grid.nodes);
    let w = grid.complex_weights();
    DiscreteOperator::from_kernel_matrix(m, &w, &w, weighting)
}

static FLIP_QA_SIGN: AtomicBool = AtomicBool::new(false);

/// Flip the sign of the `gamma_tilde -> gamma` block of every assembled
/// `Q_a`. Only meant for checking that the validation suite notices.
#[doc(hidden)]
pub fn set_qa_sign_fault(on: bool) {
    FLIP_QA_SIGN.store(on, Ordering::SeqCst);
}

/// `f` and `h` at every node of a labelled grid.
pub fn fh_on_grid(grid: &QuadratureGrid, p: &ModelParams) -> (Vec<[Complex64; 2]>, Vec<[Complex64; 2]>) {
    grid.nodes
        .par_iter()
        .zip(&grid.labels)
        .map(|(&z, &l)| vectors_fh(z, l, p))
        .unzip()
}

/// `Q_a` on a union grid, right-weighted: `Q(z_i, z_j) w_j`.
pub fn qa_operator(p: &ModelParams, union: &QuadratureGrid) -> DiscreteOperator {
    let (f, h) = fh_on_grid(union, p);
    let flip = FLIP_QA_SIGN.load(Ordering::SeqCst);
    let nodes = &union.nodes;
    let labels = &union.labels;
    let m = CMatrix::from_fn(union.len(), union.len(), |i, j| {
        if labels[i] == labels[j] {
            return Complex64::new(0.0, 0.0);
        }
        let v = (f[i][0] * h[j][0] + f[i][1] * h[j][1]) / (nodes[i] - nodes[j]);
        if flip && labels[i] == ContourLabel::GammaTilde {
            -v
        } else {
            v
        }
    });
    DiscreteOperator::from_kernel_matrix(m, &union.weights, &union.weights, Weighting::RightWeight)
}

/// `H_a = A_a B` on `gamma_tilde`, with the inner `gamma` integral on its own grid.
pub fn ha_operator(p: &ModelParams, gamma_tilde: &QuadratureGrid, inner: &QuadratureGrid) -> DiscreteOperator {
    let (fs, hs) = fh_on_grid(gamma_tilde, p);
    let (ft, ht) = fh_on_grid(inner, p);
    let s = &gamma_tilde.nodes;
    let t = &inner.nodes;
    // A[i][k] = A_a(s_i, t_k) w_k,  B[k][j] = B(t_k, s_j)
    let a = CMatrix::from_fn(s.len(), t.len(), |i, k| {
        fs[i][0] * ht[k][0] / (s[i] - t[k]) * inner.weights[k]
    });
    let b = CMatrix::from_fn(t.len(), s.len(), |k, j| ft[k][1] * hs[j][1] / (t[k] - s[j]));
    let h = a.matmul(&b);
    DiscreteOperator::from_kernel_matrix(h, &gamma_tilde.weights, &gamma_tilde.weights, Weighting::RightWeight)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Halfline,
    #[serde(rename = "contour-Q")]
    ContourQ,
    #[serde(rename = "contour-H")]
    ContourH,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::Halfline, Route::ContourQ, Route::ContourH];

    pub fn name(self) -> &'static str {
        match self {
            Route::Halfline => "halfline",
            Route::ContourQ => "contour-Q",
            Route::ContourH => "contour-H",
        }
    }
}

impl std::str::FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "halfline" | "half-line" => Ok(Route::Halfline),
            "contour-q" | "q" => Ok(Route::ContourQ),
            "contour-h" | "h" => Ok(Route::ContourH),
            _ => Err(Error::Config(format!("unknown route '{s}'"))),
        }
    }
}

/// Extra Gauss-Legendre nodes per panel on the inner grid of `H_a`, so that
/// the two contour routes do not share a discretization.
const H_INNER_EXTRA_ORDER: usize = 4;

/// `det(I - K|(a, inf))` by one route on the default geometry.
pub fn route_determinant(a: f64, alpha: f64, route: Route, res: &Resolution) -> Result<Determinant> {
    route_determinant_on(a, alpha, route, res, Geometry::default())
}

/// As [`route_determinant`] with an explicit contour geometry (ignored by the
/// half-line route except for the kernel's own contours).
pub fn route_determinant_on(
    a: f64,
    alpha: f64,
    route: Route,
    res: &Resolution,
    geometry: Geometry,
) -> Result<Determinant> {
    if !(a > 0.0) {
        return Err(Error::Domain {
            op: "gap_probability",
            detail: format!("a = {a} must be positive"),
        });
    }
    let p = ModelParams::new(alpha, a)?;
    let pair = ContourPair::build(geometry, alpha, res)?;
    let det = match route {
        Route::Halfline => {
            let k = CritKernel::from_pair(alpha, &pair)?;
            let grid = HalfLineGrid::from_resolution(a, res);
            det_i_minus(&halfline_operator(&k, &grid, Weighting::Symmetric))
        }
        Route::ContourQ => det_i_minus(&qa_operator(&p, &pair.union())),
        Route::ContourH => {
            let arm = res
                .arm_length
                .unwrap_or_else(|| crate::contour::auto_arm_length(alpha, &geometry));
            let inner = ContourSpec::hairpin(geometry.half_width, geometry.nose, arm).grid(
                res.panels,
                res.order + H_INNER_EXTRA_ORDER,
                ContourLabel::Gamma,
            )?;
            det_i_minus(&ha_operator(&p, &pair.gamma_tilde, &inner))
        }
    };
    Ok(det)
}

/// Gap probability with a self-convergence error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapValue {
    pub p: f64,
    pub log_p: f64,
    pub err: f64,
    pub imag: f64,
    pub singular_warning: bool,
}

/// `P(a)` by the chosen route; `err = |P(res) - P(res.coarse())|`.
pub fn gap_probability(a: f64, alpha: f64, route: Route, res: &Resolution) -> Result<GapValue> {
    let fine = route_determinant(a, alpha, route, res)?;
    let coarse = route_determinant(a, alpha, route, &res.coarse())?;
    Ok(GapValue {
        p: fine.value.re,
        log_p: fine.log.re,
        err: (fine.value - coarse.value).norm(),
        imag: fine.value.im,
        singular_warning: fine.singular_warning,
    })
}
