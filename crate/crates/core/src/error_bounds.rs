//! Computable factors of the asymptotic truncation-error bounds of the
//! FSGIM approximation.

use serde::Serialize;

use crate::basis::LAMBDA_EPSILON;
use crate::error::{FracError, Result};
use crate::fsgim::CaputoOrder;
use crate::special::log_gamma;

fn fractional(alpha: f64) -> Result<CaputoOrder> {
    let order = CaputoOrder::new(alpha)?;
    if order.is_integer() {
        return Err(FracError::IntegerOrder { alpha });
    }
    Ok(order)
}

/// Leading interpolation-error coefficient
/// `sqrt(pi) 2^(-2 lambda - 2n - 1) Gamma(m+n+2 lambda+1)
///  / ((n-m+1)! Gamma(m-alpha) Gamma(m+lambda+1/2) Gamma(n+lambda+1))`.
pub fn eta_coefficient(alpha: f64, lambda: f64, n: usize) -> Result<f64> {
    let order = fractional(alpha)?;
    let m = order.m();
    if n + 1 < m {
        return Err(FracError::Domain(format!("eta needs n >= m - 1, got n = {n}, m = {m}")));
    }
    if lambda <= -0.5 {
        return Err(FracError::Domain(format!("lambda = {lambda} must exceed -1/2")));
    }
    let (mf, nf) = (m as f64, n as f64);
    let log = 0.5 * std::f64::consts::PI.ln() - (2.0 * lambda + 2.0 * nf + 1.0) * std::f64::consts::LN_2
        + log_gamma(mf + nf + 2.0 * lambda + 1.0)?
        - log_gamma(nf - mf + 2.0)?
        - log_gamma(order.gap())?
        - log_gamma(mf + lambda + 0.5)?
        - log_gamma(nf + lambda + 1.0)?;
    Ok(log.exp())
}

/// Asymptotic bound factor
/// `e^(-1/2) a^(-lambda-m) (a sinh(1/a))^((1 - 2 lambda - 2m)/4)`,
/// with `a = lambda + m - 1/2`.
pub fn vartheta_factor(m: usize, lambda: f64) -> Result<f64> {
    let a = lambda + m as f64 - 0.5;
    if a <= 0.0 {
        return Err(FracError::Domain(format!(
            "vartheta needs lambda + m > 1/2, got {}",
            a + 0.5
        )));
    }
    let log =
        -0.5 - (lambda + m as f64) * a.ln() + (1.0 - 2.0 * lambda - 2.0 * m as f64) / 4.0 * (a * (1.0 / a).sinh()).ln();
    Ok(log.exp())
}

/// Exponential decay factor of the quadrature error in `n_q`:
/// `(x / (m - alpha))^(n_q+1) eta^((n_q+1)(1-m+alpha)/(m-alpha))`.
pub fn lambda_decay(alpha: f64, x: f64, eta_point: f64, n_q: usize) -> Result<f64> {
    let gap = fractional(alpha)?.gap();
    let k = n_q as f64 + 1.0;
    Ok((x / gap).powf(k) * eta_point.powf(k * (1.0 - gap) / gap))
}

/// Whether the quadrature error bound decays exponentially with `n_q`:
/// `x eta^((1-m+alpha)/(m-alpha)) / (m-alpha) < 1`.
pub fn quadrature_convergence_check(alpha: f64, x: f64, eta_point: f64) -> Result<bool> {
    let gap = fractional(alpha)?.gap();
    Ok(x * eta_point.powf((1.0 - gap) / gap) / gap < 1.0)
}

/// `ln E(j)` with
/// `E(j) = j^(1-2 lambda-2m) (j-m-n_q)^(m+n_q-j+1/2) (j+n_q)^(j+2 lambda+m+n_q+1/2)`,
/// defined for `j > m + n_q`.
pub fn log_e_factor(j: usize, lambda: f64, m: usize, n_q: usize) -> Result<f64> {
    if j <= m + n_q {
        return Err(FracError::Domain(format!("E(j) needs j > m + n_q = {}", m + n_q)));
    }
    let (jf, mf, qf) = (j as f64, m as f64, n_q as f64);
    Ok((1.0 - 2.0 * lambda - 2.0 * mf) * jf.ln()
        + (mf + qf - jf + 0.5) * (jf - mf - qf).ln()
        + (jf + 2.0 * lambda + mf + qf + 0.5) * (jf + qf).ln())
}

/// Diagnostics for one discretization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorDiagnostics {
    /// Interpolation-error coefficient; `None` when `n < m - 1`.
    pub eta: Option<f64>,
    pub vartheta: f64,
    /// Decay factor at `eta_point = 1`.
    pub lambda_decay: f64,
    pub convergent: bool,
    pub recommended_lambda_q_max: f64,
    /// `lambda_q` lies outside `[-1/2 + eps, lambda + 2m + 1]`.
    pub lambda_q_flagged: bool,
    /// `n_q > n - m - 1`: the quadrature is exact on the interpolant and
    /// only the interpolation error remains.
    pub quadrature_truncation_vanishes: bool,
    pub notes: Vec<String>,
}

pub fn total_bound_report(
    alpha: f64,
    lambda: f64,
    lambda_q: f64,
    n: usize,
    n_q: usize,
    x: f64,
) -> Result<ErrorDiagnostics> {
    let order = fractional(alpha)?;
    let m = order.m();
    let eta = if n + 1 >= m {
        Some(eta_coefficient(alpha, lambda, n)?)
    } else {
        None
    };
    let vartheta = vartheta_factor(m, lambda)?;
    let recommended = lambda + 2.0 * m as f64 + 1.0;
    let flagged = lambda_q < -0.5 + LAMBDA_EPSILON || lambda_q > recommended;
    let vanishes = n_q as i64 > n as i64 - m as i64 - 1;
    let convergent = quadrature_convergence_check(alpha, x, 1.0)?;

    let mut notes = Vec::new();
    if flagged {
        notes.push(format!(
            "lambda_q = {lambda_q} lies outside the recommended range [{}, {recommended}]",
            -0.5 + LAMBDA_EPSILON
        ));
    }
    if vanishes {
        notes.push(format!(
            "n_q = {n_q} > n - m - 1 = {}: quadrature truncation error vanishes, only interpolation error remains",
            n as i64 - m as i64 - 1
        ));
    }
    if !convergent {
        notes.push(format!(
            "quadrature convergence condition fails at x = {x} with eta = 1"
        ));
    }
    if m as f64 >= n_q as f64 / 2.0 {
        notes.push(format!("m = {m} is not small relative to n_q = {n_q}"));
    }
    Ok(ErrorDiagnostics {
        eta,
        vartheta,
        lambda_decay: lambda_decay(alpha, x, 1.0, n_q)?,
        convergent,
        recommended_lambda_q_max: recommended,
        lambda_q_flagged: flagged,
        quadrature_truncation_vanishes: vanishes,
        notes,
    })
}
