//! Small dense row-major matrices and a column-pivoted Householder QR
//! least-squares solver. Every operator in this crate is a few hundred rows
//! at most, so nothing here tries to be cache-blocked.

use std::ops::{Index, IndexMut};

use crate::error::{FracError, Result};

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Self { rows, cols, data }
    }

    /// Stacks equally long rows. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r);
        }
        Self::from_vec(nrows, ncols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(FracError::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: f64, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Appends the rows of `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix::from_vec(self.rows + other.rows, self.cols, data)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    // scaled to avoid overflow for large entries
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

/// Outcome of a least-squares solve.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    /// Euclidean norm of `A x - b`.
    pub residual_norm: f64,
    pub rank: usize,
}

/// Solves `min ||A x - b||_2` for `A` with at least as many rows as columns,
/// by Householder QR with column pivoting. Fails with
/// [`FracError::RankDeficient`] when the numerical rank (relative tolerance
/// `max(m, n) * eps * |R_00|`) is below the column count.
pub fn lstsq(a: &Matrix, b: &[f64]) -> Result<LeastSquares> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(FracError::LengthMismatch {
            expected: m,
            got: b.len(),
        });
    }
    if m < n {
        return Err(FracError::Domain(format!(
            "least squares needs rows >= cols, got {m}x{n}"
        )));
    }
    let mut r = a.clone();
    let mut qtb = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut col_norms: Vec<f64> = (0..n).map(|j| (0..m).map(|i| r[(i, j)].powi(2)).sum::<f64>()).collect();

    for k in 0..n {
        // pivot: largest remaining column
        let (p, _) = col_norms[k..].iter().enumerate().fold(
            (k, -1.0),
            |best, (off, &v)| if v > best.1 { (k + off, v) } else { best },
        );
        if p != k {
            perm.swap(k, p);
            col_norms.swap(k, p);
            for i in 0..m {
                let t = r[(i, k)];
                r[(i, k)] = r[(i, p)];
                r[(i, p)] = t;
            }
        }

        let x: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        let alpha = norm2(&x);
        if alpha == 0.0 {
            continue;
        }
        let sign = if x[0] >= 0.0 { 1.0 } else { -1.0 };
        let mut v = x;
        v[0] += sign * alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();

        for j in k..n {
            let s: f64 = v.iter().enumerate().map(|(t, vi)| vi * r[(k + t, j)]).sum();
            let f = 2.0 * s / vnorm2;
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= f * vi;
            }
        }
        let s: f64 = v.iter().enumerate().map(|(t, vi)| vi * qtb[k + t]).sum();
        let f = 2.0 * s / vnorm2;
        for (t, vi) in v.iter().enumerate() {
            qtb[k + t] -= f * vi;
        }
        for j in k + 1..n {
            col_norms[j] = (k + 1..m).map(|i| r[(i, j)].powi(2)).sum();
        }
    }

    let r00 = if n > 0 { r[(0, 0)].abs() } else { 0.0 };
    let tol = (m.max(n) as f64) * f64::EPSILON * r00;
    let rank = (0..n).take_while(|&k| r[(k, k)].abs() > tol).count();
    if rank < n {
        return Err(FracError::RankDeficient { rank, required: n });
    }

    let mut y = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| r[(k, j)] * y[j]).sum();
        y[k] = (qtb[k] - s) / r[(k, k)];
    }
    let mut solution = vec![0.0; n];
    for (k, &pk) in perm.iter().enumerate() {
        solution[pk] = y[k];
    }
    let ax = a.mul_vec(&solution)?;
    let resid: Vec<f64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    Ok(LeastSquares {
        solution,
        residual_norm: norm2(&resid),
        rank,
    })
}
