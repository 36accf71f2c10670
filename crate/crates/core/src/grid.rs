//! Shifted Gegenbauer-Gauss (SGG) nodes on `[0, 1]` with their Christoffel
//! numbers and barycentric weights.

use std::f64::consts::PI;

use crate::basis::{sg_derivative_factor, sg_value_compensated, sg_values, sg_values_into, BasisParams};
use crate::error::{FracError, Result};
use crate::linalg::dot;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;
const POLISH_STEPS: usize = 2;
const MIN_NODE_GAP: f64 = 1e-12;

/// The `n + 1` zeros of `G_{n+1}^lambda` together with the quadrature and
/// interpolation data attached to them. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    params: BasisParams,
    nodes: Vec<f64>,
    christoffel: Vec<f64>,
    norm_factors: Vec<f64>,
    bary_weights: Vec<f64>,
}

impl Grid {
    /// Builds the grid for `params` (nodes by Newton iteration on the
    /// three-term recurrence).
    pub fn new(params: BasisParams) -> Result<Self> {
        let nodes = sgg_nodes(params)?;
        let norm_factors = params.normalization();
        let inv_norm: Vec<f64> = norm_factors.iter().map(|v| 1.0 / v).collect();
        let mut buf = Vec::with_capacity(params.n() + 1);
        let christoffel = nodes
            .iter()
            .map(|&x| {
                sg_values_into(params.lambda(), params.n(), x, &mut buf);
                let s: f64 = buf.iter().zip(&inv_norm).map(|(g, w)| g * g * w).sum();
                1.0 / s
            })
            .collect();
        let bary_weights = barycentric_weights(&nodes);
        Ok(Self {
            params,
            nodes,
            christoffel,
            norm_factors,
            bary_weights,
        })
    }

    pub fn params(&self) -> BasisParams {
        self.params
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda()
    }

    /// Polynomial degree `n`; the grid has `n + 1` nodes.
    pub fn degree(&self) -> usize {
        self.params.n()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn christoffel(&self) -> &[f64] {
        &self.christoffel
    }

    pub fn norm_factors(&self) -> &[f64] {
        &self.norm_factors
    }

    pub fn bary_weights(&self) -> &[f64] {
        &self.bary_weights
    }

    /// Gauss rule for the weight `(x - x^2)^(lambda - 1/2)`; exact for
    /// polynomials up to degree `2n + 1`.
    pub fn weighted_quadrature(&self, samples: &[f64]) -> Result<f64> {
        self.check_len(samples)?;
        Ok(dot(&self.christoffel, samples))
    }

    /// Samples `f` at the nodes.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    pub(crate) fn check_len(&self, samples: &[f64]) -> Result<()> {
        if samples.len() == self.len() {
            Ok(())
        } else {
            Err(FracError::LengthMismatch {
                expected: self.len(),
                got: samples.len(),
            })
        }
    }
}

/// Zeros of `G_{n+1}^lambda`, ascending and symmetric about 1/2.
fn sgg_nodes(params: BasisParams) -> Result<Vec<f64>> {
    let lambda = params.lambda();
    let n = params.n();
    let deg = n + 1;
    let slope = sg_derivative_factor(deg, 1, lambda)?;
    let denom = 2.0 * deg as f64 + 2.0 * lambda;

    // Newton on the left half only; the right half is its mirror image, which
    // keeps full relative accuracy for nodes close to 0.
    let half = deg.div_ceil(2);
    let mut nodes = vec![0.0; deg];
    let mut buf = Vec::with_capacity(deg + 1);
    for k in 0..half {
        if 2 * k == n {
            nodes[k] = 0.5;
            continue;
        }
        // Chebyshev-type guess, shifted inward by lambda; exact Chebyshev roots at lambda = 0
        let theta = (2.0 * k as f64 + 1.0 + lambda) * PI / denom;
        let mut x = 0.5 * (1.0 - theta.cos());
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            sg_values_into(lambda, deg, x, &mut buf);
            let f = buf[deg];
            let df = slope * sg_values(lambda + 1.0, n, x)[n];
            let dx = f / df;
            x -= dx;
            if !x.is_finite() {
                break;
            }
            if dx.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(FracError::NewtonFailed {
                index: k,
                iterations: NEWTON_MAX_ITER,
            });
        }
        // polish with a compensated residual: plain f64 evaluation noise
        // would otherwise cap the relative accuracy of nodes near 0
        for _ in 0..POLISH_STEPS {
            x -= sg_value_compensated(lambda, deg, x) / (slope * sg_values(lambda + 1.0, n, x)[n]);
        }
        nodes[k] = x;
        nodes[n - k] = 1.0 - x;
    }

    for k in 1..deg {
        if nodes[k] - nodes[k - 1] < MIN_NODE_GAP {
            return Err(FracError::DuplicateNodes(k - 1, k));
        }
    }
    if nodes[0] <= 0.0 || nodes[n] >= 1.0 {
        return Err(FracError::Domain("SGG node fell outside (0, 1)".into()));
    }
    Ok(nodes)
}

/// `w_k = 1 / prod_{j != k} (x_k - x_j)`, scaled so that `max |w_k| = 1`.
/// Accumulated as log magnitudes plus a sign so large grids do not underflow.
fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let logs: Vec<(f64, f64)> = nodes
        .iter()
        .enumerate()
        .map(|(k, &xk)| {
            let mut log_mag = 0.0;
            let mut sign = 1.0;
            for (j, &xj) in nodes.iter().enumerate() {
                if j != k {
                    let d = xk - xj;
                    log_mag -= d.abs().ln();
                    if d < 0.0 {
                        sign = -sign;
                    }
                }
            }
            (log_mag, sign)
        })
        .collect();
    let top = logs.iter().map(|l| l.0).fold(f64::NEG_INFINITY, f64::max);
    logs.iter().map(|&(l, s)| s * (l - top).exp()).collect()
}
