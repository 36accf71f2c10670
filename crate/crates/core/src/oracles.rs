//! Reference Caputo derivatives: closed forms for monomials, exponentials and
//! polynomials, and a brute-force adaptive Simpson integrator of the
//! transformed Caputo integral.

use std::fmt;
use std::str::FromStr;

use crate::error::{FracError, Result};
use crate::fsgim::CaputoOrder;
use crate::special::{gamma, recip_gamma};

const SERIES_MAX_TERMS: usize = 2000;

/// Absolute tolerance of [`brute_force_caputo`].
pub const BRUTE_FORCE_TOL: f64 = 1e-12;
/// Maximum number of Simpson panels in [`brute_force_caputo`].
pub const BRUTE_FORCE_MAX_INTERVALS: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionKind {
    /// `t^N`
    Monomial(u32),
    /// `exp(beta t)`
    Exponential(f64),
    /// `sum_i c_i t^i`
    Polynomial(Vec<f64>),
}

/// A function with analytically known derivatives of every order.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    kind: FunctionKind,
    descriptor: String,
}

impl TestFunction {
    pub fn monomial(n: u32) -> Self {
        Self {
            kind: FunctionKind::Monomial(n),
            descriptor: format!("monomial:{n}"),
        }
    }

    pub fn exponential(beta: f64) -> Self {
        Self {
            kind: FunctionKind::Exponential(beta),
            descriptor: format!("exp:{beta}"),
        }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(FracError::Domain("polynomial needs at least one coefficient".into()));
        }
        let list: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
        Ok(Self {
            descriptor: format!("poly:{}", list.join(",")),
            kind: FunctionKind::Polynomial(coeffs),
        })
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivative(0, t)
    }

    /// `f^(m)(t)`
    pub fn derivative(&self, m: usize, t: f64) -> f64 {
        match &self.kind {
            FunctionKind::Monomial(n) => monomial_derivative(*n as usize, 1.0, m, t),
            FunctionKind::Exponential(beta) => beta.powi(m as i32) * (beta * t).exp(),
            FunctionKind::Polynomial(c) => c
                .iter()
                .enumerate()
                .map(|(i, &ci)| monomial_derivative(i, ci, m, t))
                .sum(),
        }
    }

    /// Closed-form Caputo derivative of order `alpha` at `t`.
    pub fn exact_caputo(&self, alpha: f64, t: f64) -> Result<f64> {
        let order = CaputoOrder::new(alpha)?;
        check_t(t)?;
        match &self.kind {
            FunctionKind::Monomial(n) => monomial_caputo(*n as usize, order, t),
            FunctionKind::Exponential(beta) => Ok(exponential_caputo(*beta, order, t)),
            FunctionKind::Polynomial(c) => {
                let mut acc = 0.0;
                for (i, &ci) in c.iter().enumerate() {
                    if ci != 0.0 {
                        acc += ci * monomial_caputo(i, order, t)?;
                    }
                }
                Ok(acc)
            }
        }
    }

    /// [`brute_force_caputo`] fed with this function's `m`-th derivative.
    pub fn brute_force_caputo(&self, alpha: f64, t: f64) -> Result<f64> {
        let m = CaputoOrder::new(alpha)?.m();
        brute_force_caputo(|x| self.derivative(m, x), alpha, t)
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor)
    }
}

impl FromStr for TestFunction {
    type Err = FracError;

    /// Accepts `monomial:N`, `exp:BETA`, `poly:C0,C1,...` and the aliases
    /// `x^2`, `1+x`, `x^2-x`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || FracError::UnknownFunction(s.to_string());
        let spec = s.trim();
        let mut f = match spec {
            "x^2" => Self::monomial(2),
            "1+x" => Self::polynomial(vec![1.0, 1.0])?,
            "x^2-x" => Self::polynomial(vec![0.0, -1.0, 1.0])?,
            _ => {
                let (head, tail) = spec.split_once(':').ok_or_else(bad)?;
                match head {
                    "monomial" => Self::monomial(tail.trim().parse().map_err(|_| bad())?),
                    "exp" => {
                        let beta: f64 = tail.trim().parse().map_err(|_| bad())?;
                        if !beta.is_finite() {
                            return Err(bad());
                        }
                        Self::exponential(beta)
                    }
                    "poly" => {
                        let coeffs = tail
                            .split(',')
                            .map(|c| c.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
                            .collect::<Option<Vec<f64>>>()
                            .ok_or_else(bad)?;
                        Self::polynomial(coeffs)?
                    }
                    _ => return Err(bad()),
                }
            }
        };
        f.descriptor = spec.to_string();
        Ok(f)
    }
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(FracError::Domain(format!("t = {t} lies outside [0, 1]")))
    }
}

fn falling_factorial(n: usize, m: usize) -> f64 {
    ((n - m + 1)..=n).map(|k| k as f64).product()
}

fn monomial_derivative(n: usize, c: f64, m: usize, t: f64) -> f64 {
    if n < m {
        0.0
    } else {
        c * falling_factorial(n, m) * t.powi((n - m) as i32)
    }
}

/// `D^alpha t^N = N! / Gamma(N + 1 - alpha) t^(N - alpha)` for `N >= m`,
/// zero otherwise.
fn monomial_caputo(n: usize, order: CaputoOrder, t: f64) -> Result<f64> {
    if n < order.m() {
        return Ok(0.0);
    }
    let alpha = order.alpha();
    let nf = n as f64;
    let coeff = if order.is_integer() {
        falling_factorial(n, order.m())
    } else {
        gamma(nf + 1.0)? / gamma(nf + 1.0 - alpha)?
    };
    Ok(coeff * t.powf(nf - alpha))
}

/// `sum_k beta^(k+m) t^(k+m-alpha) / Gamma(k+m-alpha+1)`, regular at `t = 0`.
fn exponential_caputo(beta: f64, order: CaputoOrder, t: f64) -> f64 {
    let m = order.m();
    let gap = order.gap();
    let mut term = beta.powi(m as i32) * t.powf(gap) * recip_gamma(gap + 1.0);
    let mut sum = term;
    for k in 0..SERIES_MAX_TERMS {
        term *= beta * t / (k as f64 + gap + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
    }
    sum
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson quadrature of `g` over `[a, b]` to absolute tolerance
/// `tol`, refusing to use more than `max_intervals` panels.
pub fn adaptive_simpson<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, tol: f64, max_intervals: usize) -> Result<f64> {
    let (fa, fb) = (g(a), g(b));
    let fm = g(0.5 * (a + b));
    let mut stack = vec![Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(a, b, fa, fm, fb),
        tol,
    }];
    let mut total = 0.0;
    let mut leaves = 1usize;
    while let Some(p) = stack.pop() {
        let mid = 0.5 * (p.a + p.b);
        let (lm, rm) = (0.5 * (p.a + mid), 0.5 * (mid + p.b));
        let (flm, frm) = (g(lm), g(rm));
        let left = simpson(p.a, mid, p.fa, flm, p.fm);
        let right = simpson(mid, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if delta.abs() <= 15.0 * p.tol || mid <= p.a || mid >= p.b {
            total += left + right + delta / 15.0;
            continue;
        }
        leaves += 1;
        if leaves > max_intervals {
            return Err(FracError::ToleranceNotMet {
                tolerance: tol,
                intervals: max_intervals,
            });
        }
        let half = 0.5 * p.tol;
        stack.push(Panel {
            a: mid,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            tol: half,
        });
        stack.push(Panel {
            a: p.a,
            b: mid,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            tol: half,
        });
    }
    Ok(total)
}

/// `t^(m-alpha) / Gamma(m-alpha+1) * int_0^1 f_m(t (1 - y^(1/(m-alpha)))) dy`
/// by adaptive Simpson, where `f_m` is the `m`-th derivative of `f`. For
/// integer `alpha` this is just `f_m(t)`.
pub fn brute_force_caputo<F: Fn(f64) -> f64>(f_m: F, alpha: f64, t: f64) -> Result<f64> {
    let order = CaputoOrder::new(alpha)?;
    check_t(t)?;
    if order.is_integer() {
        return Ok(f_m(t));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let gap = order.gap();
    let inv_gap = 1.0 / gap;
    let integrand = |y: f64| {
        let p = if y <= 0.0 { 0.0 } else { (y.ln() * inv_gap).exp() };
        f_m(t * (1.0 - p))
    };
    let integral = adaptive_simpson(integrand, 0.0, 1.0, BRUTE_FORCE_TOL, BRUTE_FORCE_MAX_INTERVALS)?;
    Ok(t.powf(gap) * recip_gamma(gap + 1.0) * integral)
}
