//! Spectral fractional calculus on `[0, 1]`.
//!
//! Caputo derivatives of any positive non-integer order are approximated
//! with fractional shifted Gegenbauer integration matrices (FSGIMs): the
//! derivative is rewritten as a scaled integral of the `m`-th derivative of
//! the Lagrange interpolant (`m = ceil(alpha)`), the derivative of each
//! shifted Gegenbauer polynomial is expressed through a polynomial of lower
//! degree and higher index, and the remaining integral is done with an
//! interpolatory shifted Gegenbauer quadrature. Integer orders fall back to
//! barycentric differentiation matrices.
//!
//! On top of that, [`bagley_torvik`] solves two-point boundary value
//! problems `a D^alpha u + b D^1.5 u + c u = f` with Dirichlet data by
//! orthogonal collocation.
//!
//! ```
//! use fracspec::{BasisParams, Grid, QuadratureRule, CaputoOrder, build_fsgim};
//!
//! let grid = Grid::new(BasisParams::new(0.5, 3).unwrap()).unwrap();
//! let rule = QuadratureRule::new(&Grid::new(BasisParams::new(0.5, 15).unwrap()).unwrap()).unwrap();
//! let order = CaputoOrder::new(1.5).unwrap();
//! let op = build_fsgim(order, &grid, &rule, &[0.5]).unwrap();
//! let samples: Vec<f64> = grid.nodes().iter().map(|x| x * x).collect();
//! let d = op.apply(&samples).unwrap();
//! // D^1.5 x^2 = 2 / Gamma(1.5) * sqrt(x)
//! assert!((d[0] - 1.5957691216057308).abs() < 1e-12);
//! ```

pub mod bagley_torvik;
pub mod basis;
pub mod cache;
pub mod differentiation;
pub mod error;
pub mod error_bounds;
pub mod exec;
pub mod fsgim;
pub mod grid;
pub mod interpolation;
pub mod linalg;
pub mod oracles;
pub mod quadrature;
pub mod special;
pub mod sweep;

pub use bagley_torvik::{BagleyTorvikProblem, Discretization, Forcing, ProblemSpec, SpectralSolution};
pub use basis::BasisParams;
pub use differentiation::Sgdm;
pub use error::{FracError, Result};
pub use exec::Execution;
pub use fsgim::{build_fsgim, caputo_any_order, CaputoOrder, Fsgim};
pub use grid::Grid;
pub use interpolation::InterpolantRowSet;
pub use linalg::Matrix;
pub use oracles::TestFunction;
pub use quadrature::QuadratureRule;
