//! Integer-order differentiation matrices at SGG nodes (barycentric form).

use crate::error::{FracError, Result};
use crate::grid::Grid;
use crate::linalg::Matrix;

/// `k`-th order shifted Gegenbauer differentiation matrix.
#[derive(Clone, Debug)]
pub struct Sgdm {
    order: usize,
    matrix: Matrix,
}

impl Sgdm {
    /// First-order entries `(w_j / w_i) / (x_i - x_j)` with the diagonal set
    /// to minus the off-diagonal row sum; higher orders are matrix powers.
    pub fn new(grid: &Grid, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(FracError::Domain("differentiation order must be positive".into()));
        }
        let d1 = first_order(grid.nodes(), grid.bary_weights())?;
        let mut matrix = d1.clone();
        for _ in 1..order {
            matrix = matrix.matmul(&d1);
        }
        Ok(Self { order, matrix })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.matrix.mul_vec(samples)
    }
}

pub(crate) fn first_order(nodes: &[f64], weights: &[f64]) -> Result<Matrix> {
    let n = nodes.len();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let gap = nodes[i] - nodes[j];
            if gap.abs() < 1e-12 {
                return Err(FracError::DuplicateNodes(i.min(j), i.max(j)));
            }
            let v = (weights[j] / weights[i]) / gap;
            d[(i, j)] = v;
            diag -= v;
        }
        d[(i, i)] = diag;
    }
    Ok(d)
}
