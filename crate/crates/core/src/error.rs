use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("gamma function has a pole at {0}")]
    Pole(f64),

    #[error("result overflows double precision: {0}")]
    Overflow(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("Newton iteration for node {index} did not converge in {iterations} iterations")]
    NewtonFailed { index: usize, iterations: usize },

    #[error("nodes {0} and {1} coincide to within 1e-12")]
    DuplicateNodes(usize, usize),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error(
        "order {alpha} is an integer; use the differentiation-matrix path \
         (caputo_any_order or Sgdm) instead of an FSGIM"
    )]
    IntegerOrder { alpha: f64 },

    #[error("least-squares system is rank deficient: numerical rank {rank} < {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("adaptive quadrature could not reach tolerance {tolerance:e} within {intervals} intervals")]
    ToleranceNotMet { tolerance: f64, intervals: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("cache file is corrupt: {0}")]
    CorruptCache(String),

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FracError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FracError>;
