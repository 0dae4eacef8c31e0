//! Dense complex matrices and partially pivoted LU.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rayon::prelude::*;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Fill entry `(i, j)` with `f(i, j)`, rows in parallel.
    pub fn from_fn<F>(rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> Complex64 + Sync,
    {
        let mut data = vec![ZERO; rows * cols];
        if cols > 0 {
            data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(i, j);
                }
            });
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let n = other.cols;
        let mut data = vec![ZERO; self.rows * n];
        if n > 0 {
            data.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
                for (k, &a) in self.row(i).iter().enumerate() {
                    if a == ZERO {
                        continue;
                    }
                    for (o, &b) in out.iter_mut().zip(other.row(k)) {
                        *o += a * b;
                    }
                }
            });
        }
        CMatrix {
            rows: self.rows,
            cols: n,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> CMatrix {
        assert!(self.is_square());
        let mut m = self.clone();
        for v in &mut m.data {
            *v = -*v;
        }
        for i in 0..self.rows {
            m[(i, i)] += ONE;
        }
        m
    }

    /// Scale column `j` by `d[j]`.
    pub fn scale_columns(&mut self, d: &[Complex64]) {
        assert_eq!(d.len(), self.cols);
        for row in self.data.chunks_mut(self.cols) {
            for (v, s) in row.iter_mut().zip(d) {
                *v *= s;
            }
        }
    }

    /// Scale row `i` by `d[i]`.
    pub fn scale_rows(&mut self, d: &[Complex64]) {
        assert_eq!(d.len(), self.rows);
        for (row, s) in self.data.chunks_mut(self.cols).zip(d) {
            for v in row {
                *v *= s;
            }
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `P A = L U` with unit lower `L`; both factors stored in one matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    factors: CMatrix,
    perm: Vec<usize>,
    odd: bool,
    min_pivot: f64,
    min_pivot_column: usize,
}

impl Lu {
    pub fn new(mut a: CMatrix) -> Self {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.rows;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        let mut min_pivot = f64::INFINITY;
        let mut min_pivot_column = 0;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax < min_pivot {
                min_pivot = pmax;
                min_pivot_column = k;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                odd = !odd;
            }
            let pivot = a[(k, k)];
            if pivot == ZERO {
                continue;
            }
            let inv = ONE / pivot;
            let (head, tail) = a.data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..(k + 1) * n];
            let update = |row: &mut [Complex64]| {
                let l = row[k] * inv;
                row[k] = l;
                if l != ZERO {
                    for (r, &u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                        *r -= l * u;
                    }
                }
            };
            if (n - k) * (n - k) > 64 * 64 {
                tail.par_chunks_mut(n).for_each(update);
            } else {
                tail.chunks_mut(n).for_each(update);
            }
        }
        Lu {
            factors: a,
            perm,
            odd,
            min_pivot,
            min_pivot_column,
        }
    }

    pub fn dim(&self) -> usize {
        self.factors.rows
    }

    /// Smallest pivot magnitude encountered.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    /// Elimination step at which the smallest pivot occurred.
    pub fn min_pivot_column(&self) -> usize {
        self.min_pivot_column
    }

    pub fn det(&self) -> Complex64 {
        let mut d = if self.odd { -ONE } else { ONE };
        for i in 0..self.dim() {
            d *= self.factors[(i, i)];
        }
        d
    }

    /// `log det`, with the imaginary part accumulated (not wrapped).
    pub fn log_det(&self) -> Complex64 {
        let mut l = if self.odd {
            Complex64::new(0.0, std::f64::consts::PI)
        } else {
            ZERO
        };
        for i in 0..self.dim() {
            l += self.factors[(i, i)].ln();
        }
        l
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(rhs.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = self.factors.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.factors.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }
}
