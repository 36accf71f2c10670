//! Lagrange interpolation at SGG nodes, in modal (orthogonal-expansion)
//! form and in the barycentric second form.

use crate::basis::sg_values_into;
use crate::error::{FracError, Result};
use crate::exec::Execution;
use crate::grid::Grid;
use crate::linalg::{dot, Matrix};

/// Points closer than this to a node are treated as the node itself.
pub const NODE_COINCIDENCE_TOL: f64 = 1e-14;

/// Lagrange cardinal functions evaluated at a batch of points:
/// row `i` is `[L_0(z_i), ..., L_n(z_i)]`.
#[derive(Clone, Debug)]
pub struct InterpolantRowSet<'g> {
    grid: &'g Grid,
    eval_points: Vec<f64>,
    matrix: Matrix,
}

impl<'g> InterpolantRowSet<'g> {
    pub fn grid(&self) -> &'g Grid {
        self.grid
    }

    pub fn eval_points(&self) -> &[f64] {
        &self.eval_points
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// Interpolated values of `samples` at every evaluation point.
    pub fn apply(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(samples)?;
        self.matrix.mul_vec(samples)
    }
}

/// `B[j][k] = w_k G_j(x_k) / lambda_bar_j`, so that the modal cardinal row
/// at `z` is `G(z)^T B`.
pub(crate) fn modal_coefficients(grid: &Grid) -> Matrix {
    let n = grid.degree();
    let mut b = Matrix::zeros(n + 1, n + 1);
    let mut buf = Vec::with_capacity(n + 1);
    for (k, &xk) in grid.nodes().iter().enumerate() {
        sg_values_into(grid.lambda(), n, xk, &mut buf);
        let wk = grid.christoffel()[k];
        for j in 0..=n {
            b[(j, k)] = wk * buf[j] / grid.norm_factors()[j];
        }
    }
    b
}

fn check_points(points: &[f64]) -> Result<()> {
    match points.iter().find(|z| !(0.0..=1.0).contains(*z)) {
        Some(z) => Err(FracError::Domain(format!("evaluation point {z} lies outside [0, 1]"))),
        None => Ok(()),
    }
}

/// Modal cardinal rows
/// `L_k(z) = w_k sum_j G_j(x_k) G_j(z) / lambda_bar_j`.
pub fn lagrange_rows<'g>(grid: &'g Grid, eval_points: &[f64]) -> Result<InterpolantRowSet<'g>> {
    lagrange_rows_with(grid, eval_points, Execution::default())
}

pub fn lagrange_rows_with<'g>(grid: &'g Grid, eval_points: &[f64], exec: Execution) -> Result<InterpolantRowSet<'g>> {
    check_points(eval_points)?;
    let n = grid.degree();
    let b = modal_coefficients(grid);
    let rows = exec.map_indexed(eval_points.len(), |i| {
        let mut g = Vec::with_capacity(n + 1);
        sg_values_into(grid.lambda(), n, eval_points[i], &mut g);
        let mut row = vec![0.0; n + 1];
        for (j, &gj) in g.iter().enumerate() {
            for (r, &bjk) in row.iter_mut().zip(b.row(j)) {
                *r += gj * bjk;
            }
        }
        row
    });
    Ok(InterpolantRowSet {
        grid,
        eval_points: eval_points.to_vec(),
        matrix: Matrix::from_vec(eval_points.len(), n + 1, rows.concat()),
    })
}

fn barycentric_row(grid: &Grid, z: f64) -> Vec<f64> {
    let nodes = grid.nodes();
    let mut row = vec![0.0; nodes.len()];
    if let Some(k) = nodes.iter().position(|&x| (z - x).abs() <= NODE_COINCIDENCE_TOL) {
        row[k] = 1.0;
        return row;
    }
    let mut total = 0.0;
    for ((r, &x), &w) in row.iter_mut().zip(nodes).zip(grid.bary_weights()) {
        *r = w / (z - x);
        total += *r;
    }
    row.iter_mut().for_each(|r| *r /= total);
    row
}

/// Cardinal rows from the barycentric second form.
pub fn barycentric_rows<'g>(grid: &'g Grid, eval_points: &[f64]) -> Result<InterpolantRowSet<'g>> {
    check_points(eval_points)?;
    let rows: Vec<f64> = eval_points.iter().flat_map(|&z| barycentric_row(grid, z)).collect();
    Ok(InterpolantRowSet {
        grid,
        eval_points: eval_points.to_vec(),
        matrix: Matrix::from_vec(eval_points.len(), grid.len(), rows),
    })
}

/// `I_n f(z)` by the barycentric formula; returns the sample itself when `z`
/// coincides with a node.
pub fn interpolate(grid: &Grid, samples: &[f64], z: f64) -> Result<f64> {
    grid.check_len(samples)?;
    check_points(&[z])?;
    Ok(dot(&barycentric_row(grid, z), samples))
}

/// `I_n f(z)` through the modal expansion.
pub fn interpolate_modal(grid: &Grid, samples: &[f64], z: f64) -> Result<f64> {
    grid.check_len(samples)?;
    lagrange_rows_with(grid, &[z], Execution::Sequential)?
        .apply(samples)
        .map(|v| v[0])
}
