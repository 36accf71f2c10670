//! Convergence sweeps over `(lambda, n)` against closed-form derivatives.

use std::fmt::Write as _;

use crate::basis::BasisParams;
use crate::error::{FracError, Result};
use crate::exec::Execution;
use crate::fsgim::caputo_any_order;
use crate::grid::Grid;
use crate::oracles::TestFunction;
use crate::quadrature::QuadratureRule;

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub function: TestFunction,
    pub alpha: f64,
    pub lambdas: Vec<f64>,
    pub degrees: Vec<usize>,
    pub lambda_q: f64,
    pub n_q: usize,
    pub points: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub n: usize,
    pub point: f64,
    pub abs_error: f64,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.degrees.is_empty() || self.points.is_empty() {
            return Err(FracError::Domain("sweep ranges must be nonempty".into()));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(FracError::Domain(format!("alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    /// Rows ordered by lambda, then n, then point.
    pub fn run(&self, exec: Execution) -> Result<Vec<SweepRow>> {
        self.validate()?;
        let rule = QuadratureRule::with_params(self.lambda_q, self.n_q)?;
        let exact = self
            .points
            .iter()
            .map(|&t| self.function.exact_caputo(self.alpha, t))
            .collect::<Result<Vec<f64>>>()?;
        let cells = self.lambdas.len() * self.degrees.len();
        let blocks = exec.try_map_indexed(cells, |c| {
            let lambda = self.lambdas[c / self.degrees.len()];
            let n = self.degrees[c % self.degrees.len()];
            let grid = Grid::new(BasisParams::new(lambda, n)?)?;
            let samples = grid.sample(|x| self.function.value(x));
            let approx = caputo_any_order(self.alpha, &grid, &rule, &samples, &self.points)?;
            Ok::<_, FracError>(
                self.points
                    .iter()
                    .zip(approx.iter().zip(&exact))
                    .map(|(&point, (a, e))| SweepRow {
                        lambda,
                        n,
                        point,
                        abs_error: (a - e).abs(),
                    })
                    .collect::<Vec<_>>(),
            )
        })?;
        Ok(blocks.concat())
    }
}

/// CSV with header `lambda,n,point,abs_error,log10_abs_error`.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("lambda,n,point,abs_error,log10_abs_error\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:e},{}",
            r.lambda,
            r.n,
            r.point,
            r.abs_error,
            r.abs_error.log10()
        );
    }
    out
}
