//! Oriented integration contours and their quadrature grids.
//!
//! Two contours carry all of the kernels: the hairpin `gamma`, which comes in
//! from `-inf` below the real axis, turns around a semicircular nose and goes
//! back out above it (enclosing `0, -1, -2, ...` counterclockwise), and the
//! upward vertical line `gamma_tilde` to its right.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, graded_breaks};
use crate::special::gamma;

/// Which contour a node belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContourLabel {
    #[serde(rename = "gamma")]
    Gamma,
    #[serde(rename = "gamma_tilde")]
    GammaTilde,
}

/// A smooth piece of a contour, parametrized by `u` in `[0, 1]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Segment {
    Line {
        from: Complex64,
        to: Complex64,
    },
    Arc {
        center: Complex64,
        radius: f64,
        start: f64,
        end: f64,
    },
}

impl Segment {
    pub fn point(&self, u: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * u,
            Segment::Arc {
                center,
                radius,
                start,
                end,
            } => center + Complex64::from_polar(radius, start + (end - start) * u),
        }
    }

    /// `d point / du`.
    pub fn derivative(&self, u: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, end, .. } => {
                let th = start + (end - start) * u;
                Complex64::new(0.0, 1.0) * Complex64::from_polar(radius, th) * (end - start)
            }
        }
    }
}

/// A segment together with its panel breakpoints in parameter space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Piece {
    pub segment: Segment,
    pub breaks: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ContourKind {
    Hairpin,
    VerticalLine,
    CustomPiecewise,
}

/// Geometric description of one contour.
///
/// For a hairpin, `crossing` is the nose abscissa and `truncation` the arm
/// length measured from the arc center; `closed_at` closes the loop with a
/// downward vertical segment at that abscissa. For a line, `crossing` is the
/// abscissa and `truncation` the half-height.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContourSpec {
    pub kind: ContourKind,
    pub half_width: f64,
    pub crossing: f64,
    pub truncation: f64,
    pub closed_at: Option<f64>,
    pub custom: Vec<Segment>,
}

impl ContourSpec {
    pub fn hairpin(half_width: f64, nose: f64, arm_length: f64) -> Self {
        ContourSpec {
            kind: ContourKind::Hairpin,
            half_width,
            crossing: nose,
            truncation: arm_length,
            closed_at: None,
            custom: Vec::new(),
        }
    }

    pub fn vertical(abscissa: f64, half_height: f64) -> Self {
        ContourSpec {
            kind: ContourKind::VerticalLine,
            half_width: 0.0,
            crossing: abscissa,
            truncation: half_height,
            closed_at: None,
            custom: Vec::new(),
        }
    }

    pub fn custom(segments: Vec<Segment>) -> Self {
        ContourSpec {
            kind: ContourKind::CustomPiecewise,
            half_width: 0.0,
            crossing: 0.0,
            truncation: 0.0,
            closed_at: None,
            custom: segments,
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Geometry(msg));
        match self.kind {
            ContourKind::Hairpin => {
                let d = self.half_width;
                if !(d > 0.0 && d < 0.5) {
                    return bad(format!("hairpin half-width {d} must lie in (0, 1/2)"));
                }
                if !(self.crossing > 0.0) {
                    return bad(format!("hairpin nose {} must be positive", self.crossing));
                }
                if !(self.truncation > 0.0) {
                    return bad("hairpin arm length must be positive".into());
                }
                if let Some(x) = self.closed_at {
                    if !(x < self.crossing - d) {
                        return bad(format!("closing abscissa {x} must lie left of the nose arc"));
                    }
                }
            }
            ContourKind::VerticalLine => {
                if !(self.truncation > 0.0) || !self.crossing.is_finite() {
                    return bad("vertical line needs a finite abscissa and positive height".into());
                }
            }
            ContourKind::CustomPiecewise => {
                if self.custom.is_empty() {
                    return bad("custom contour has no segments".into());
                }
            }
        }
        Ok(())
    }

    /// Split the contour into panelled pieces, `panels` per arm or line.
    pub fn pieces(&self, panels: usize) -> Result<Vec<Piece>> {
        self.check()?;
        let pieces = match self.kind {
            ContourKind::Hairpin => {
                let d = self.half_width;
                let center = self.crossing - d;
                let left = match self.closed_at {
                    Some(x) => x,
                    None => center - self.truncation,
                };
                let arm = center - left;
                // First arm panel no longer than the distance to the poles.
                let arm_breaks = graded_breaks(arm, panels, d.min(arm / panels as f64));
                let lower = Piece {
                    segment: Segment::Line {
                        from: Complex64::new(left, -d),
                        to: Complex64::new(center, -d),
                    },
                    breaks: arm_breaks.iter().rev().map(|b| 1.0 - b / arm).collect(),
                };
                let upper = Piece {
                    segment: Segment::Line {
                        from: Complex64::new(center, d),
                        to: Complex64::new(left, d),
                    },
                    breaks: arm_breaks.iter().map(|b| b / arm).collect(),
                };
                // The nose may pass close to the pole at 0; grade toward the apex.
                let arc_half = (panels / 8).max(2);
                let first = (FRAC_PI_2 / arc_half as f64).min(0.5 * self.crossing / d);
                let half = graded_breaks(FRAC_PI_2, arc_half, first);
                let mut arc_breaks: Vec<f64> = half.iter().rev().map(|t| 0.5 - t / PI).collect();
                arc_breaks.extend(half.iter().skip(1).map(|t| 0.5 + t / PI));
                let arc = Piece {
                    segment: Segment::Arc {
                        center: Complex64::new(center, 0.0),
                        radius: d,
                        start: -FRAC_PI_2,
                        end: FRAC_PI_2,
                    },
                    breaks: arc_breaks,
                };
                let mut out = vec![lower, arc, upper];
                if self.closed_at.is_some() {
                    out.push(Piece {
                        segment: Segment::Line {
                            from: Complex64::new(left, d),
                            to: Complex64::new(left, -d),
                        },
                        breaks: vec![0.0, 0.5, 1.0],
                    });
                }
                out
            }
            ContourKind::VerticalLine => {
                let h = self.truncation;
                let half_panels = (panels / 2).max(1);
                let half = graded_breaks(h, half_panels, 0.25f64.min(h / half_panels as f64));
                let mut breaks: Vec<f64> = half.iter().rev().map(|t| 0.5 - 0.5 * t / h).collect();
                breaks.extend(half.iter().skip(1).map(|t| 0.5 + 0.5 * t / h));
                vec![Piece {
                    segment: Segment::Line {
                        from: Complex64::new(self.crossing, -h),
                        to: Complex64::new(self.crossing, h),
                    },
                    breaks,
                }]
            }
            ContourKind::CustomPiecewise => self
                .custom
                .iter()
                .map(|s| Piece {
                    segment: s.clone(),
                    breaks: (0..=panels).map(|k| k as f64 / panels as f64).collect(),
                })
                .collect(),
        };
        Ok(pieces)
    }

    pub fn grid(&self, panels: usize, order: usize, label: ContourLabel) -> Result<QuadratureGrid> {
        if !(1..=64).contains(&order) {
            return Err(Error::Geometry(format!("order {order} outside [1, 64]")));
        }
        let pieces = self.pieces(panels)?;
        Ok(QuadratureGrid::from_pieces(&pieces, order, label))
    }
}

/// Quadrature nodes on a union of contours; weights carry `dz`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    pub labels: Vec<ContourLabel>,
    pub panel_count: usize,
    pub order_per_panel: usize,
}

impl QuadratureGrid {
    pub fn from_pieces(pieces: &[Piece], order: usize, label: ContourLabel) -> Self {
        let (gx, gw) = gauss_legendre(order);
        let mut grid = QuadratureGrid {
            order_per_panel: order,
            ..Default::default()
        };
        for piece in pieces {
            for pair in piece.breaks.windows(2) {
                let half = 0.5 * (pair[1] - pair[0]);
                let mid = 0.5 * (pair[1] + pair[0]);
                for (x, w) in gx.iter().zip(&gw) {
                    let u = mid + half * x;
                    grid.nodes.push(piece.segment.point(u));
                    grid.weights.push(piece.segment.derivative(u) * (half * w));
                    grid.labels.push(label);
                }
                grid.panel_count += 1;
            }
        }
        grid
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_j w_j f(z_j)`.
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&z, &w)| w * f(z)).sum()
    }

    /// Concatenate two grids (nodes of `self` first).
    pub fn concat(&self, other: &QuadratureGrid) -> QuadratureGrid {
        let mut out = self.clone();
        out.nodes.extend_from_slice(&other.nodes);
        out.weights.extend_from_slice(&other.weights);
        out.labels.extend_from_slice(&other.labels);
        out.panel_count += other.panel_count;
        out
    }

    /// Smallest distance from any node to the poles `0, -1, -2, ...`.
    pub fn min_pole_distance(&self) -> f64 {
        self.nodes
            .iter()
            .map(|z| {
                let k = z.re.round().min(0.0);
                Complex64::new(z.re - k, z.im).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid serializes")
    }
}

fn check_panels_order(panels: usize, order: usize) -> Result<()> {
    if panels < 4 {
        return Err(Error::Geometry(format!("need at least 4 panels, got {panels}")));
    }
    if !(4..=64).contains(&order) {
        return Err(Error::Geometry(format!("order {order} outside [4, 64]")));
    }
    Ok(())
}

/// Hairpin grid around the non-positive integers with `panels` panels per arm.
pub fn build_hairpin(
    half_width: f64,
    nose: f64,
    arm_length: f64,
    panels: usize,
    order: usize,
) -> Result<QuadratureGrid> {
    check_panels_order(panels, order)?;
    if !(nose > 0.0 && nose < 0.5) {
        return Err(Error::Geometry(format!("nose {nose} must lie in (0, 1/2)")));
    }
    if !(arm_length >= 5.0) {
        return Err(Error::Geometry(format!("arm length {arm_length} must be at least 5")));
    }
    ContourSpec::hairpin(half_width, nose, arm_length).grid(panels, order, ContourLabel::Gamma)
}

/// Upward vertical grid on `[b - iT, b + iT]`.
pub fn build_vertical(b: f64, half_height: f64, panels: usize, order: usize) -> Result<QuadratureGrid> {
    check_panels_order(panels, order)?;
    if !(half_height >= 5.0) {
        return Err(Error::Geometry(format!("half-height {half_height} must be at least 5")));
    }
    ContourSpec::vertical(b, half_height).grid(panels, order, ContourLabel::GammaTilde)
}

/// Placement of the contour pair: hairpin half-width and nose, line abscissa.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub half_width: f64,
    pub nose: f64,
    pub line: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            half_width: 0.25,
            nose: 0.25,
            line: 0.5,
        }
    }
}

/// Minimal horizontal clearance between the hairpin nose and the line.
pub const CONTOUR_MARGIN: f64 = 0.05;

impl Geometry {
    /// Nose at `1/(alpha a)`, line through the saddle `a/alpha`.
    pub fn deformed(alpha: f64, a: f64) -> Result<Self> {
        if !(alpha > 0.0 && a > 0.0) {
            return Err(Error::Geometry(format!("need alpha, a > 0 (alpha={alpha}, a={a})")));
        }
        let nose = 1.0 / (alpha * a);
        let line = a / alpha;
        if nose >= line {
            return Err(Error::Geometry(format!(
                "deformed nose {nose} does not lie left of the line {line} (a^2 <= 1)"
            )));
        }
        Ok(Geometry {
            half_width: 0.25,
            nose,
            line,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width < 0.5) {
            return Err(Error::Geometry(format!(
                "half-width {} outside (0, 1/2)",
                self.half_width
            )));
        }
        if !(self.nose > 0.0) {
            return Err(Error::Geometry(format!("nose {} must be positive", self.nose)));
        }
        if !(self.line >= self.nose + CONTOUR_MARGIN) {
            return Err(Error::Geometry(format!(
                "line at {} is not clear of the nose at {}",
                self.line, self.nose
            )));
        }
        Ok(())
    }
}

/// Discretization knobs shared by all routes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    /// Panels per hairpin arm, and per full vertical line.
    pub panels: usize,
    /// Gauss-Legendre nodes per panel.
    pub order: usize,
    /// Hairpin arm length; chosen from the integrand decay when `None`.
    pub arm_length: Option<f64>,
    /// Line half-height; chosen from the integrand decay when `None`.
    pub line_half_height: Option<f64>,
    pub halfline_panels: usize,
    pub halfline_order: usize,
    pub halfline_length: f64,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            panels: 16,
            order: 16,
            arm_length: None,
            line_half_height: None,
            halfline_panels: 8,
            halfline_order: 16,
            halfline_length: 40.0,
        }
    }
}

impl Resolution {
    /// Half the panels everywhere; used for self-convergence error estimates.
    pub fn coarse(&self) -> Self {
        Resolution {
            panels: (self.panels / 2).max(4),
            halfline_panels: (self.halfline_panels / 2).max(2),
            ..*self
        }
    }

    /// Twice the panels everywhere.
    pub fn refined(&self) -> Self {
        Resolution {
            panels: self.panels * 2,
            halfline_panels: self.halfline_panels * 2,
            ..*self
        }
    }
}

/// Log-magnitude drop below the peak at which contours are truncated.
const DECAY_DROP: f64 = 38.0;
const MIN_TRUNCATION: f64 = 10.0;

/// Arm length beyond which `|Gamma(t) exp(-alpha t^2 / 2)|` has fallen
/// `e^-38` below its peak on the arm (at least 10).
pub fn auto_arm_length(alpha: f64, geometry: &Geometry) -> f64 {
    let center = geometry.nose - geometry.half_width;
    let d = geometry.half_width;
    let profile = |r: f64| {
        let t = Complex64::new(center - r, d);
        let lg = gamma(t).map(|g| g.norm().ln()).unwrap_or(f64::NEG_INFINITY);
        lg - 0.5 * alpha * (t * t).re
    };
    decay_length(profile).max(MIN_TRUNCATION)
}

/// Line half-height beyond which `|exp(alpha s^2 / 2) / Gamma(s)|` has fallen
/// `e^-38` below its peak (at least 10).
pub fn auto_line_half_height(alpha: f64, geometry: &Geometry) -> f64 {
    let b = geometry.line;
    let profile = |tau: f64| {
        let s = Complex64::new(b, tau);
        0.5 * alpha * (s * s).re + crate::special::recip_gamma(s).norm().ln()
    };
    decay_length(profile).max(MIN_TRUNCATION)
}

fn decay_length<F: Fn(f64) -> f64>(profile: F) -> f64 {
    let step = 0.25;
    let mut peak = f64::NEG_INFINITY;
    let mut r = 0.0;
    while r < 400.0 {
        let v = profile(r);
        peak = peak.max(v);
        if v < peak - DECAY_DROP {
            return r + 1.0;
        }
        r += step;
    }
    r
}

/// The two grids of an admissible contour pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContourPair {
    pub geometry: Geometry,
    pub gamma: QuadratureGrid,
    pub gamma_tilde: QuadratureGrid,
}

impl ContourPair {
    pub fn build(geometry: Geometry, alpha: f64, res: &Resolution) -> Result<Self> {
        geometry.validate()?;
        if !(alpha > 0.0) {
            return Err(Error::Domain {
                op: "contour pair",
                detail: format!("alpha = {alpha}"),
            });
        }
        let arm = res.arm_length.unwrap_or_else(|| auto_arm_length(alpha, &geometry));
        let height = res
            .line_half_height
            .unwrap_or_else(|| auto_line_half_height(alpha, &geometry));
        let gamma = ContourSpec::hairpin(geometry.half_width, geometry.nose, arm).grid(
            res.panels,
            res.order,
            ContourLabel::Gamma,
        )?;
        let gamma_tilde =
            ContourSpec::vertical(geometry.line, height).grid(res.panels, res.order, ContourLabel::GammaTilde)?;
        Ok(ContourPair {
            geometry,
            gamma,
            gamma_tilde,
        })
    }

    pub fn default_for(alpha: f64, res: &Resolution) -> Result<Self> {
        Self::build(Geometry::default(), alpha, res)
    }

    /// Union grid ordered (`gamma_tilde` nodes, `gamma` nodes).
    pub fn union(&self) -> QuadratureGrid {
        self.gamma_tilde.concat(&self.gamma)
    }
}

/// `(gamma grid with nose at 1/(alpha a), gamma_tilde grid through a/alpha)`.
pub fn deformed_contours(
    alpha: f64,
    a: f64,
    truncation: f64,
    panels: usize,
    order: usize,
) -> Result<(QuadratureGrid, QuadratureGrid)> {
    check_panels_order(panels, order)?;
    let g = Geometry::deformed(alpha, a)?;
    let res = Resolution {
        panels,
        order,
        arm_length: Some(truncation),
        line_half_height: Some(truncation),
        ..Resolution::default()
    };
    let pair = ContourPair::build(g, alpha, &res)?;
    Ok((pair.gamma, pair.gamma_tilde))
}

/// `(1/2 pi i) int_gamma Gamma(z) exp(-alpha z^2/2 + a z) dz` on a grid.
pub fn gamma_contour_integral(alpha: f64, a: f64, grid: &QuadratureGrid) -> Complex64 {
    let s = grid.integrate(|z| gamma(z).expect("contour avoids poles") * (-0.5 * alpha * z * z + a * z).exp());
    s / Complex64::new(0.0, 2.0 * PI)
}
