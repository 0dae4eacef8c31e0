//! Gauss-Legendre rules and composite panel layouts on real intervals.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Breakpoints `0 = d_0 < d_1 < ... < d_panels = length` whose panel
/// lengths grow geometrically from `first` (uniform if `first` already
/// covers the interval evenly).
pub fn graded_breaks(length: f64, panels: usize, first: f64) -> Vec<f64> {
    assert!(panels >= 1 && length > 0.0);
    let n = panels as i32;
    let uniform = length / panels as f64;
    if first >= uniform {
        return (0..=panels).map(|k| uniform * k as f64).collect();
    }
    // Solve first * (r^n - 1) / (r - 1) = length for r > 1.
    let total = |r: f64| first * (r.powi(n) - 1.0) / (r - 1.0);
    let (mut lo, mut hi) = (1.0 + 1e-12, 2.0);
    while total(hi) < length {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) < length {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let mut breaks = Vec::with_capacity(panels + 1);
    let mut acc = 0.0;
    let mut h = first;
    breaks.push(0.0);
    for _ in 0..panels {
        acc += h;
        breaks.push(acc);
        h *= r;
    }
    *breaks.last_mut().unwrap() = length;
    breaks
}

/// Composite Gauss-Legendre rule on `[lo, hi]` with uniform panels.
pub fn composite_interval(lo: f64, hi: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let breaks: Vec<f64> = (0..=panels)
        .map(|k| lo + (hi - lo) * k as f64 / panels as f64)
        .collect();
    composite_on_breaks(&breaks, order)
}

/// Composite Gauss-Legendre rule over consecutive breakpoints.
pub fn composite_on_breaks(breaks: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity((breaks.len() - 1) * order);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let half = 0.5 * (pair[1] - pair[0]);
        let mid = 0.5 * (pair[1] + pair[0]);
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 33, 64] {
            let (_, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let (x, w) = gauss_legendre(8);
        // degree 15 is integrated exactly
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn graded_breaks_cover_interval() {
        let b = graded_breaks(10.0, 16, 0.25);
        assert_eq!(b.len(), 17);
        assert!((b[1] - 0.25).abs() < 1e-12);
        assert!((b[16] - 10.0).abs() < 1e-12);
        assert!(b.windows(3).all(|w| w[2] - w[1] >= w[1] - w[0] - 1e-12));
        let u = graded_breaks(2.0, 4, 1.0);
        assert!((u[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn composite_integrates_exponential() {
        let (x, w) = composite_interval(0.0, 3.0, 4, 12);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((s - (3f64.exp() - 1.0)).abs() < 1e-12);
    }
}
