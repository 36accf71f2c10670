//! Collocation solver for `a D^alpha u + b D^1.5 u + c u = f` on `[0, 1]`
//! with `u(0) = gamma_1`, `u(1) = gamma_2`.
//!
//! The `n + 1` collocation equations at the SGG nodes and the two boundary
//! rows are stacked into an `(n + 3) x (n + 1)` system, solved in the
//! least-squares sense.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::BasisParams;
use crate::error::{FracError, Result};
use crate::fsgim::caputo_matrix;
use crate::grid::Grid;
use crate::interpolation::{interpolate, lagrange_rows};
use crate::linalg::{dot, lstsq, Matrix};
use crate::quadrature::QuadratureRule;
use crate::special::gamma;

/// Order of the fixed fractional damping term.
pub const DAMPING_ORDER: f64 = 1.5;

/// `(lambda, n)` of the collocation grid and `(lambda_q, n_q)` of the
/// quadrature grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub lambda: f64,
    pub n: usize,
    pub lambda_q: f64,
    pub n_q: usize,
}

impl Discretization {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(BasisParams::new(self.lambda, self.n)?)
    }

    pub fn rule(&self) -> Result<QuadratureRule> {
        QuadratureRule::with_params(self.lambda_q, self.n_q)
    }
}

/// Right-hand side of the equation.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Forcing {
    /// One of the registered forcings, see [`builtin_forcing`].
    Builtin { name: String },
    /// Values at the SGG nodes, in ascending node order.
    Samples { values: Vec<f64> },
    #[serde(skip)]
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Forcing {
    pub fn function<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self::Function(Arc::new(f))
    }

    fn at_nodes(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            Self::Builtin { name } => builtin_forcing(name).map(|f| grid.sample(f)),
            Self::Samples { values } => {
                grid.check_len(values)?;
                Ok(values.clone())
            }
            Self::Function(f) => Ok(grid.sample(|x| f(x))),
        }
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Builtin { name } => f.debug_struct("Builtin").field("name", name).finish(),
            Self::Samples { values } => f.debug_struct("Samples").field("values", values).finish(),
            Self::Function(_) => f.write_str("Function(..)"),
        }
    }
}

fn bt1(x: f64) -> f64 {
    x * x + 2.0 + 4.0 * (x / std::f64::consts::PI).sqrt()
}

fn bt2(x: f64) -> f64 {
    1.0 + x
}

fn bt3(x: f64) -> f64 {
    // Gamma(3/2) = sqrt(pi) / 2
    let g = gamma(1.5).unwrap_or(0.886_226_925_452_758);
    2.0 * x.sqrt() / g + x * (x - 1.0)
}

/// Registered forcings: `bt1 = x^2 + 2 + 4 sqrt(x/pi)`, `bt2 = 1 + x`,
/// `bt3 = 2 sqrt(x) / Gamma(3/2) + x (x - 1)`.
pub fn builtin_forcing(name: &str) -> Result<fn(f64) -> f64> {
    match name {
        "bt1" => Ok(bt1),
        "bt2" => Ok(bt2),
        "bt3" => Ok(bt3),
        other => Err(FracError::UnknownFunction(other.to_string())),
    }
}

/// The JSON problem description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: [f64; 2],
    pub forcing: Forcing,
    pub discretization: Discretization,
}

/// A validated two-point boundary value problem.
#[derive(Clone, Debug)]
pub struct BagleyTorvikProblem {
    spec: ProblemSpec,
}

impl BagleyTorvikProblem {
    pub fn new(spec: ProblemSpec) -> Result<Self> {
        let s = &spec;
        let coeffs = [s.a, s.b, s.c, s.alpha, s.gamma[0], s.gamma[1]];
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(FracError::InvalidProblem("coefficients must be finite".into()));
        }
        if s.alpha <= 1.0 {
            return Err(FracError::InvalidProblem(format!(
                "alpha must exceed 1, got {}",
                s.alpha
            )));
        }
        if s.a == 0.0 && s.b == 0.0 && s.c == 0.0 {
            return Err(FracError::InvalidProblem("a, b and c are all zero".into()));
        }
        if let Forcing::Builtin { name } = &s.forcing {
            builtin_forcing(name)?;
        }
        Ok(Self { spec })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ProblemSpec = serde_json::from_str(text).map_err(|e| FracError::InvalidProblem(e.to_string()))?;
        Self::new(spec)
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    /// The stacked system `(A, rhs)`: collocation rows at the nodes, then
    /// the boundary rows at 0 and 1.
    pub fn assemble(&self) -> Result<(Grid, Matrix, Vec<f64>)> {
        let s = &self.spec;
        let grid = s.discretization.grid()?;
        let rule = s.discretization.rule()?;
        let nodes = grid.nodes();
        let size = grid.len();

        let mut top = Matrix::identity(size);
        top.scale(s.c);
        if s.a != 0.0 {
            top.add_scaled(s.a, &caputo_matrix(s.alpha, &grid, &rule, nodes)?);
        }
        if s.b != 0.0 {
            top.add_scaled(s.b, &caputo_matrix(DAMPING_ORDER, &grid, &rule, nodes)?);
        }
        let boundary = lagrange_rows(&grid, &[0.0, 1.0])?.into_matrix();
        let system = top.vstack(&boundary);

        let mut rhs = s.forcing.at_nodes(&grid)?;
        rhs.extend_from_slice(&s.gamma);
        Ok((grid, system, rhs))
    }

    pub fn solve(&self) -> Result<SpectralSolution> {
        let (grid, system, rhs) = self.assemble()?;
        let ls = lstsq(&system, &rhs)?;
        let n1 = grid.len();
        let residual = |row: usize| dot(system.row(row), &ls.solution) - rhs[row];
        Ok(SpectralSolution {
            boundary_residuals: (residual(n1), residual(n1 + 1)),
            residual_norm: ls.residual_norm,
            nodal_values: ls.solution,
            grid,
        })
    }
}

/// Nodal solution values plus solve diagnostics.
#[derive(Clone, Debug)]
pub struct SpectralSolution {
    grid: Grid,
    nodal_values: Vec<f64>,
    residual_norm: f64,
    boundary_residuals: (f64, f64),
}

impl SpectralSolution {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn nodal_values(&self) -> &[f64] {
        &self.nodal_values
    }

    /// Euclidean norm of the least-squares residual of the stacked system.
    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    /// `(u(0) - gamma_1, u(1) - gamma_2)` of the interpolated solution.
    pub fn boundary_residuals(&self) -> (f64, f64) {
        self.boundary_residuals
    }

    /// `u(z)` by barycentric interpolation.
    pub fn evaluate(&self, z: f64) -> Result<f64> {
        interpolate(&self.grid, &self.nodal_values, z)
    }
}

/// `k` equispaced points `0, 1/(k-1), ..., 1`.
pub fn equispaced(k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..k).map(|i| i as f64 / (k - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::TestFunction;

    fn problem(a: f64, c: f64, alpha: f64, gamma: [f64; 2], forcing: Forcing, d: (f64, usize)) -> BagleyTorvikProblem {
        BagleyTorvikProblem::new(ProblemSpec {
            a,
            b: 1.0,
            c,
            alpha,
            gamma,
            forcing,
            discretization: Discretization {
                lambda: d.0,
                n: d.1,
                lambda_q: d.0,
                n_q: d.1,
            },
        })
        .unwrap()
    }

    fn builtin(name: &str) -> Forcing {
        Forcing::Builtin { name: name.into() }
    }

    fn max_error(sol: &SpectralSolution, exact: impl Fn(f64) -> f64) -> f64 {
        equispaced(50)
            .into_iter()
            .map(|z| (sol.evaluate(z).unwrap() - exact(z)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn three_reference_problems() {
        let cases = [
            (
                problem(1.0, 1.0, 2.0, [0.0, 1.0], builtin("bt1"), (1.1, 4)),
                (|x: f64| x * x) as fn(f64) -> f64,
            ),
            (problem(1.0, 1.0, 2.0, [1.0, 2.0], builtin("bt2"), (2.0, 2)), |x| {
                1.0 + x
            }),
            (problem(0.0, 1.0, 2.0, [0.0, 0.0], builtin("bt3"), (1.0, 3)), |x| {
                x * x - x
            }),
        ];
        for (p, exact) in cases {
            let sol = p.solve().unwrap();
            assert!(max_error(&sol, exact) <= 1e-12);
            assert!(sol.residual_norm() <= 1e-10);
            let (r0, r1) = sol.boundary_residuals();
            assert!(r0.abs() <= 1e-10 && r1.abs() <= 1e-10);
        }
        let sol = problem(0.0, 1.0, 2.0, [0.0, 0.0], builtin("bt3"), (1.0, 3))
            .solve()
            .unwrap();
        assert!((sol.evaluate(0.5).unwrap() + 0.25).abs() <= 1e-12);
    }

    #[test]
    fn boundary_rows_and_identity_block() {
        let p = problem(0.0, 1.0, 2.0, [0.0, 1.0], builtin("bt2"), (0.5, 4));
        let (grid, a, rhs) = p.assemble().unwrap();
        assert_eq!((a.rows(), a.cols(), rhs.len()), (7, 5, 7));
        let sq = grid.sample(|x| x * x);
        assert!(dot(a.row(5), &sq).abs() <= 1e-13);
        assert!((dot(a.row(6), &sq) - 1.0).abs() <= 1e-12);

        let mut spec = p.spec().clone();
        spec.b = 0.0;
        spec.c = 1.0;
        let (_, a, _) = BagleyTorvikProblem::new(spec).unwrap().assemble().unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(a[(i, j)], if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn manufactured_cube() {
        let cube = TestFunction::monomial(3);
        let f = Forcing::function(move |x: f64| {
            cube.exact_caputo(1.75, x).unwrap() + cube.exact_caputo(1.5, x).unwrap() + x.powi(3)
        });
        for n in [5usize, 8, 12] {
            let p = problem(1.0, 1.0, 1.75, [0.0, 1.0], f.clone(), (0.5, n));
            let sol = p.solve().unwrap();
            for (u, x) in sol.nodal_values().iter().zip(sol.grid().nodes()) {
                assert!((u - x.powi(3)).abs() <= 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn lambda_invariance() {
        let values: Vec<f64> = [0.5, 1.0, 1.1]
            .iter()
            .map(|&l| {
                let sol = problem(1.0, 1.0, 2.0, [0.0, 1.0], builtin("bt1"), (l, 6))
                    .solve()
                    .unwrap();
                sol.evaluate(0.37).unwrap()
            })
            .collect();
        for v in &values {
            assert!((v - 0.37 * 0.37).abs() <= 1e-10);
        }
    }

    #[test]
    fn sample_forcing_matches_builtin() {
        let base = problem(1.0, 1.0, 2.0, [0.0, 1.0], builtin("bt1"), (1.1, 4));
        let grid = base.spec().discretization.grid().unwrap();
        let mut spec = base.spec().clone();
        spec.forcing = Forcing::Samples {
            values: grid.sample(bt1),
        };
        let a = BagleyTorvikProblem::new(spec.clone()).unwrap().solve().unwrap();
        let b = base.solve().unwrap();
        assert_eq!(a.nodal_values(), b.nodal_values());
        spec.forcing = Forcing::Samples { values: vec![1.0; 3] };
        assert!(matches!(
            BagleyTorvikProblem::new(spec).unwrap().solve(),
            Err(FracError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn validation_and_json() {
        let json = r#"{"a":1,"b":1,"c":1,"alpha":2,"gamma":[0,1],
            "forcing":{"kind":"builtin","name":"bt1"},
            "discretization":{"lambda":1.1,"n":4,"lambda_q":1.1,"n_q":4}}"#;
        let p = BagleyTorvikProblem::from_json(json).unwrap();
        assert_eq!(p.spec().discretization.n, 4);
        let samples = r#"{"a":0,"b":1,"c":1,"alpha":1.5,"gamma":[0,0],
            "forcing":{"kind":"samples","values":[1,2,3]},
            "discretization":{"lambda":0.5,"n":2,"lambda_q":0.5,"n_q":4}}"#;
        assert!(BagleyTorvikProblem::from_json(samples).is_ok());
        assert!(BagleyTorvikProblem::from_json(&json.replace("\"alpha\":2", "\"alpha\":0.5")).is_err());
        assert!(BagleyTorvikProblem::from_json(&json.replace("bt1", "bt9")).is_err());
        assert!(BagleyTorvikProblem::from_json("{").is_err());
        let zero = json.replace("\"a\":1,\"b\":1,\"c\":1", "\"a\":0,\"b\":0,\"c\":0");
        assert!(matches!(
            BagleyTorvikProblem::from_json(&zero),
            Err(FracError::InvalidProblem(_))
        ));
    }

    #[test]
    fn equispaced_points() {
        assert_eq!(equispaced(3), vec![0.0, 0.5, 1.0]);
        assert_eq!(equispaced(50).len(), 50);
    }
}
