//! The shifted Gegenbauer integration row vector: interpolatory weights
//! `p_k = int_0^1 L_k(y) dy` on an SGG grid, for the unit weight.

use crate::basis::BasisParams;
use crate::error::Result;
use crate::grid::Grid;
use crate::interpolation::barycentric_rows;
use crate::linalg::dot;

/// Quadrature `int_0^1 f(y) dy ~ sum_k p_k f(y_k)` on the nodes of `grid_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    grid_q: Grid,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Integrates every cardinal function of `grid_q` with an auxiliary
    /// Gauss-Legendre rule of `ceil((n_q + 2) / 2)` points. The cardinals
    /// have degree `n_q`, so the weights are exact up to rounding.
    pub fn new(grid_q: &Grid) -> Result<Self> {
        let n_q = grid_q.degree();
        let aux_points = (n_q + 2).div_ceil(2);
        let aux = Grid::new(BasisParams::new(0.5, aux_points - 1)?)?;
        let rows = barycentric_rows(grid_q, aux.nodes())?;
        let mut weights = vec![0.0; grid_q.len()];
        for (i, &c) in aux.christoffel().iter().enumerate() {
            for (w, &l) in weights.iter_mut().zip(rows.matrix().row(i)) {
                *w += c * l;
            }
        }
        Ok(Self {
            grid_q: grid_q.clone(),
            weights,
        })
    }

    /// Convenience constructor from `(lambda_q, n_q)`.
    pub fn with_params(lambda_q: f64, n_q: usize) -> Result<Self> {
        Self::new(&Grid::new(BasisParams::new(lambda_q, n_q)?)?)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid_q
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid_q.nodes()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `P . samples`
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        self.grid_q.check_len(samples)?;
        Ok(dot(&self.weights, samples))
    }

    /// Integrates `f` over `[0, 1]` by sampling at the rule's nodes.
    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes().iter().zip(&self.weights).map(|(&y, &w)| w * f(y)).sum()
    }
}
