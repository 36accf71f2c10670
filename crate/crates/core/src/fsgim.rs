//! Fractional shifted Gegenbauer integration matrices (FSGIMs).
//!
//! For `m - 1 < alpha < m` the Caputo derivative at `x` equals
//! `x^(m-alpha) / Gamma(m-alpha+1) * int_0^1 f^(m)(x (1 - y^(1/(m-alpha)))) dy`.
//! `f` is replaced by its SG interpolant, the `m`-th derivative of each basis
//! polynomial is a scaled SG polynomial of index `lambda + m`, and the
//! `y`-integral is done with a [`QuadratureRule`].

use log::warn;

use crate::basis::{sg_derivative_factor, sg_values_into};
use crate::differentiation::Sgdm;
use crate::error::{FracError, Result};
use crate::exec::Execution;
use crate::grid::Grid;
use crate::interpolation::{barycentric_rows, modal_coefficients};
use crate::linalg::Matrix;
use crate::quadrature::QuadratureRule;
use crate::special::gamma;

/// Orders closer than this to an integer are treated as integers.
pub const INTEGER_ORDER_TOL: f64 = 1e-12;
/// Below an integer by less than this, the fractional path is ill-conditioned.
pub const NEAR_INTEGER_WARN: f64 = 1e-3;

/// A Caputo order `alpha > 0` with `m = ceil(alpha)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CaputoOrder {
    alpha: f64,
    m: usize,
    integer: bool,
}

impl CaputoOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(FracError::Domain(format!(
                "Caputo order must be positive and finite, got {alpha}"
            )));
        }
        let nearest = alpha.round();
        if (alpha - nearest).abs() <= INTEGER_ORDER_TOL {
            return Ok(Self {
                alpha: nearest,
                m: nearest as usize,
                integer: true,
            });
        }
        let m = alpha.ceil();
        if m - alpha < NEAR_INTEGER_WARN {
            warn!(
                "alpha = {alpha} is within {:.1e} of {m}; the fractional path is poorly conditioned here",
                m - alpha
            );
        }
        Ok(Self {
            alpha,
            m: m as usize,
            integer: false,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_integer(&self) -> bool {
        self.integer
    }

    /// `m - alpha`, in `(0, 1)` for fractional orders.
    pub fn gap(&self) -> f64 {
        self.m as f64 - self.alpha
    }

    fn require_fractional(&self) -> Result<()> {
        if self.integer {
            Err(FracError::IntegerOrder { alpha: self.alpha })
        } else {
            Ok(())
        }
    }
}

/// `x (1 - y^(1/(m-alpha)))`, always in `[0, x]`.
pub fn transformed_argument(x: f64, y: f64, order: CaputoOrder) -> Result<f64> {
    order.require_fractional()?;
    Ok(transform(x, y, 1.0 / order.gap()))
}

fn transform(x: f64, y: f64, inv_gap: f64) -> f64 {
    let p = if y <= 0.0 { 0.0 } else { (y.ln() * inv_gap).exp() };
    x * (1.0 - p)
}

/// An assembled FSGIM: `matrix[i][k]` weights the sample at node `k` in the
/// approximation of `D^alpha f(z_i)`.
#[derive(Clone, Debug)]
pub struct Fsgim {
    order: CaputoOrder,
    grid: Grid,
    rule: QuadratureRule,
    eval_points: Vec<f64>,
    generator: Matrix,
    matrix: Matrix,
}

impl Fsgim {
    /// Reassembles an operator from a stored generator; the scaled matrix is
    /// recomputed.
    pub fn from_generator(
        order: CaputoOrder,
        grid: Grid,
        rule: QuadratureRule,
        eval_points: Vec<f64>,
        generator: Matrix,
    ) -> Result<Self> {
        order.require_fractional()?;
        if generator.rows() != eval_points.len() || generator.cols() != grid.len() {
            return Err(FracError::LengthMismatch {
                expected: eval_points.len() * grid.len(),
                got: generator.rows() * generator.cols(),
            });
        }
        let matrix = scale_rows(&generator, &row_scales(order, &eval_points)?);
        Ok(Self {
            order,
            grid,
            rule,
            eval_points,
            generator,
            matrix,
        })
    }

    pub fn order(&self) -> CaputoOrder {
        self.order
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn eval_points(&self) -> &[f64] {
        &self.eval_points
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `D^alpha f` at the evaluation points, as
    /// `z^(m-alpha) .* (generator * samples) / Gamma(m-alpha+1)`.
    pub fn apply(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(samples)?;
        let raw = self.generator.mul_vec(samples)?;
        let scales = row_scales(self.order, &self.eval_points)?;
        Ok(raw.iter().zip(&scales).map(|(v, s)| v * s).collect())
    }
}

fn row_scales(order: CaputoOrder, points: &[f64]) -> Result<Vec<f64>> {
    let gap = order.gap();
    let inv = 1.0 / gamma(gap + 1.0)?;
    Ok(points.iter().map(|&z| z.powf(gap) * inv).collect())
}

fn scale_rows(a: &Matrix, scales: &[f64]) -> Matrix {
    let mut out = a.clone();
    for (i, &s) in scales.iter().enumerate() {
        out.row_mut(i).iter_mut().for_each(|v| *v *= s);
    }
    out
}

fn check_points(points: &[f64]) -> Result<()> {
    match points.iter().find(|z| !(0.0..=1.0).contains(*z)) {
        Some(z) => Err(FracError::Domain(format!("evaluation point {z} lies outside [0, 1]"))),
        None => Ok(()),
    }
}

/// Builds the FSGIM for `order` on `grid`, integrating with `rule`, at
/// `eval_points`. Rows are computed in parallel when available.
pub fn build_fsgim(order: CaputoOrder, grid: &Grid, rule: &QuadratureRule, eval_points: &[f64]) -> Result<Fsgim> {
    build_fsgim_with(order, grid, rule, eval_points, Execution::default())
}

pub fn build_fsgim_with(
    order: CaputoOrder,
    grid: &Grid,
    rule: &QuadratureRule,
    eval_points: &[f64],
    exec: Execution,
) -> Result<Fsgim> {
    order.require_fractional()?;
    check_points(eval_points)?;
    let n = grid.degree();
    let m = order.m();
    let cols = grid.len();
    let generator = if n < m {
        Matrix::zeros(eval_points.len(), cols)
    } else {
        let lambda_m = grid.lambda() + m as f64;
        let chi = (m..=n)
            .map(|j| sg_derivative_factor(j, m, grid.lambda()))
            .collect::<Result<Vec<f64>>>()?;
        let b = modal_coefficients(grid);
        let inv_gap = 1.0 / order.gap();
        let rows = exec.map_indexed(eval_points.len(), |i| {
            let z = eval_points[i];
            let mut q = vec![0.0; n - m + 1];
            let mut g = Vec::with_capacity(n - m + 1);
            for (&y, &p) in rule.nodes().iter().zip(rule.weights()) {
                sg_values_into(lambda_m, n - m, transform(z, y, inv_gap), &mut g);
                for (qr, &gr) in q.iter_mut().zip(&g) {
                    *qr += p * gr;
                }
            }
            let mut row = vec![0.0; cols];
            for (r, (&c, &qr)) in chi.iter().zip(&q).enumerate() {
                let integral = c * qr;
                for (out, &bjk) in row.iter_mut().zip(b.row(r + m)) {
                    *out += integral * bjk;
                }
            }
            row
        });
        Matrix::from_vec(eval_points.len(), cols, rows.concat())
    };
    Fsgim::from_generator(order, grid.clone(), rule.clone(), eval_points.to_vec(), generator)
}

/// Dense operator for `D^alpha` from nodal samples to `eval_points`: the
/// FSGIM for fractional orders, interpolated SGDM rows for integer orders.
pub fn caputo_matrix(alpha: f64, grid: &Grid, rule: &QuadratureRule, eval_points: &[f64]) -> Result<Matrix> {
    let order = CaputoOrder::new(alpha)?;
    if order.is_integer() {
        let d = Sgdm::new(grid, order.m())?;
        Ok(barycentric_rows(grid, eval_points)?.matrix().matmul(d.matrix()))
    } else {
        Ok(build_fsgim(order, grid, rule, eval_points)?.matrix().clone())
    }
}

/// `D^alpha f` at `eval_points` for any `alpha > 0`.
pub fn caputo_any_order(
    alpha: f64,
    grid: &Grid,
    rule: &QuadratureRule,
    samples: &[f64],
    eval_points: &[f64],
) -> Result<Vec<f64>> {
    grid.check_len(samples)?;
    let order = CaputoOrder::new(alpha)?;
    if order.is_integer() {
        let d = Sgdm::new(grid, order.m())?.apply(samples)?;
        barycentric_rows(grid, eval_points)?.apply(&d)
    } else {
        build_fsgim(order, grid, rule, eval_points)?.apply(samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisParams;
    use approx::assert_relative_eq;

    fn grid(lambda: f64, n: usize) -> Grid {
        Grid::new(BasisParams::new(lambda, n).unwrap()).unwrap()
    }

    fn rule(lambda_q: f64, n_q: usize) -> QuadratureRule {
        QuadratureRule::with_params(lambda_q, n_q).unwrap()
    }

    #[test]
    fn order_classification() {
        let o = CaputoOrder::new(1.5).unwrap();
        assert_eq!((o.m(), o.is_integer()), (2, false));
        assert_eq!(o.gap(), 0.5);
        let o = CaputoOrder::new(2.0 + 1e-13).unwrap();
        assert!(o.is_integer());
        assert_eq!(o.m(), 2);
        assert_eq!(CaputoOrder::new(0.3).unwrap().m(), 1);
        assert!(CaputoOrder::new(0.0).is_err());
        assert!(CaputoOrder::new(-1.0).is_err());
        assert!(CaputoOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn transformed_argument_examples() {
        let o = CaputoOrder::new(1.5).unwrap();
        assert_eq!(transformed_argument(1.0, 1.0, o).unwrap(), 0.0);
        assert_eq!(transformed_argument(0.8, 0.0, o).unwrap(), 0.8);
        assert_relative_eq!(transformed_argument(1.0, 0.25, o).unwrap(), 0.9375, epsilon = 1e-15);
        for &y in &[0.0, 0.1, 0.5, 0.9, 1.0] {
            let t = transformed_argument(0.7, y, CaputoOrder::new(0.2).unwrap()).unwrap();
            assert!((0.0..=0.7).contains(&t));
        }
        assert!(transformed_argument(0.5, 0.5, CaputoOrder::new(2.0).unwrap()).is_err());
    }

    #[test]
    fn square_at_half() {
        let g = grid(0.5, 3);
        let op = build_fsgim(CaputoOrder::new(1.5).unwrap(), &g, &rule(0.5, 15), &[0.0, 0.5]).unwrap();
        let d = op.apply(&g.sample(|x| x * x)).unwrap();
        assert_eq!(d[0], 0.0);
        assert!(op.matrix().row(0).iter().all(|&v| v == 0.0));
        assert!((d[1] - 1.595_769_121_605_730_8).abs() <= 1e-12);
    }

    #[test]
    fn cube_at_order_two_and_a_half() {
        let g = grid(0.5, 4);
        let op = build_fsgim(CaputoOrder::new(2.5).unwrap(), &g, &rule(0.5, 15), &[0.5]).unwrap();
        let d = op.apply(&g.sample(|x| x.powi(3))).unwrap();
        assert!((d[0] - 4.787_307_364_817_192).abs() <= 1e-11);
    }

    #[test]
    fn low_degree_polynomials_vanish() {
        let pts: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        // rounding in the generator grows like n^(2m); keep n small for m = 3
        for (alpha, n) in [(0.4, 12), (1.5, 7), (2.7, 4)] {
            let order = CaputoOrder::new(alpha).unwrap();
            let g = grid(0.7, n);
            let op = build_fsgim(order, &g, &rule(0.5, 12), &pts).unwrap();
            for p in 0..order.m() as i32 {
                let d = op.apply(&g.sample(|x| x.powi(p))).unwrap();
                assert!(d.iter().all(|v| v.abs() <= 1e-12), "alpha={alpha} p={p}: {d:?}");
            }
        }
    }

    #[test]
    fn degree_below_m_gives_zero_operator() {
        let g = grid(0.5, 1);
        let op = build_fsgim(CaputoOrder::new(2.5).unwrap(), &g, &rule(0.5, 5), &[0.3, 0.9]).unwrap();
        assert!(op.matrix().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn apply_matches_matrix_product() {
        let g = grid(0.2, 9);
        let pts = [0.05, 0.3, 0.77, 1.0];
        let op = build_fsgim(CaputoOrder::new(0.65).unwrap(), &g, &rule(0.0, 14), &pts).unwrap();
        let f = g.sample(|x| (2.0 * x).cos() + x);
        let a = op.apply(&f).unwrap();
        let b = op.matrix().mul_vec(&f).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() <= 1e-13);
        }
        assert!(matches!(op.apply(&f[..3]), Err(FracError::LengthMismatch { .. })));
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let g = grid(1.0, 20);
        let pts: Vec<f64> = (0..=30).map(|i| i as f64 / 30.0).collect();
        let order = CaputoOrder::new(1.3).unwrap();
        let r = rule(0.5, 20);
        let s = build_fsgim_with(order, &g, &r, &pts, Execution::Sequential).unwrap();
        let p = build_fsgim_with(order, &g, &r, &pts, Execution::Parallel).unwrap();
        assert_eq!(s.matrix(), p.matrix());
    }

    #[test]
    fn integer_orders_are_rejected_or_dispatched() {
        let g = grid(0.5, 4);
        let r = rule(0.5, 10);
        assert!(matches!(
            build_fsgim(CaputoOrder::new(2.0).unwrap(), &g, &r, &[0.5]),
            Err(FracError::IntegerOrder { .. })
        ));
        let pts = [0.0, 0.25, 0.5, 1.0];
        let d2 = caputo_any_order(2.0, &g, &r, &g.sample(|x| x * x), &pts).unwrap();
        assert!(d2.iter().all(|v| (v - 2.0).abs() <= 1e-10));
        let d1 = caputo_any_order(1.0, &g, &r, &g.sample(|x| x.powi(3)), &[0.5]).unwrap();
        assert!((d1[0] - 0.75).abs() <= 1e-11);
        let f = g.sample(|x| x.powi(4));
        let direct = build_fsgim(CaputoOrder::new(1.5).unwrap(), &g, &r, &pts)
            .unwrap()
            .apply(&f)
            .unwrap();
        assert_eq!(caputo_any_order(1.5, &g, &r, &f, &pts).unwrap(), direct);
        let m = caputo_matrix(2.0, &g, &r, &pts).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 5));
    }
}
