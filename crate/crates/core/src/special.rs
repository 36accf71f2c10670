//! Scalar special functions: gamma, log-gamma, Pochhammer symbol and the
//! two-parameter Mittag-Leffler function with first parameter one.

use std::f64::consts::PI;

use crate::error::{FracError, Result};

/// Lanczos approximation with g = 7 and nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument with a finite gamma value.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

/// Arguments above this go through log space in [`gamma_ratio`].
const LOG_SPACE_THRESHOLD: f64 = 30.0;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// sin(pi x), reduced exactly to the period first.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    (PI * r).sin()
}

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (caller passes x - 1)
    let mut a = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// Gamma function for real arguments.
///
/// Exact products are used for small positive integers, the Lanczos
/// approximation for `x >= 0.5` and the reflection formula below that.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(FracError::Domain("gamma(NaN)".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(FracError::Pole(x));
    }
    if x > GAMMA_MAX_ARG {
        return Err(FracError::Overflow(format!("gamma({x})")));
    }
    if x < 0.5 {
        let s = sin_pi(x);
        let g = gamma(1.0 - x)?;
        let v = PI / (s * g);
        if !v.is_finite() {
            return Err(FracError::Overflow(format!("gamma({x})")));
        }
        return Ok(v);
    }
    if x == x.floor() && x <= 171.0 {
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return Ok(p);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split t^(z+1/2) so the intermediate stays finite near the top of the range
    let half = t.powf(0.5 * (z + 0.5));
    let v = (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(z);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FracError::Overflow(format!("gamma({x})")))
    }
}

/// 1/Gamma(x), zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    match gamma(x) {
        Ok(g) => 1.0 / g,
        Err(_) => 0.0,
    }
}

/// Natural log of Gamma for positive arguments.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(FracError::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    if x < 15.0 {
        return Ok(gamma(x)?.ln());
    }
    // Stirling series with Bernoulli corrections
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360_360.0 + inv2 * (1.0 / 156.0)))))));
    Ok((x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series)
}

/// Rising factorial (x)_k = x (x+1) ... (x+k-1), with (x)_0 = 1.
pub fn pochhammer(x: f64, k: u32) -> Result<f64> {
    let mut p = 1.0;
    for i in 0..k {
        p *= x + f64::from(i);
        if !p.is_finite() {
            return Err(FracError::Overflow(format!("pochhammer({x}, {k})")));
        }
    }
    Ok(p)
}

/// Ratio prod Gamma(num_i) / prod Gamma(den_i) for positive arguments.
///
/// Switches to differences of [`log_gamma`] as soon as any argument exceeds
/// 30, where the individual factors would over- or underflow.
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    let all = num.iter().chain(den);
    if all.clone().any(|&a| a.is_nan() || a <= 0.0) {
        return Err(FracError::Domain(format!(
            "gamma_ratio needs positive arguments, got {num:?} / {den:?}"
        )));
    }
    if all.clone().any(|&a| a > LOG_SPACE_THRESHOLD) {
        let mut s = 0.0;
        for &a in num {
            s += log_gamma(a)?;
        }
        for &a in den {
            s -= log_gamma(a)?;
        }
        let v = s.exp();
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(FracError::Overflow("gamma_ratio".into()))
        };
    }
    let mut v = 1.0;
    for &a in num {
        v *= gamma(a)?;
    }
    for &a in den {
        v /= gamma(a)?;
    }
    Ok(v)
}

const ML_MAX_TERMS: usize = 10_000;
const ML_MIN_TERMS: usize = 5;

/// E_{1,rho}(z) = sum_k z^k / Gamma(k + rho).
///
/// Terms come from the ratio z / (k + rho); the sum stops once a term falls
/// below 1e-17 of the running sum (at least five terms).
pub fn mittag_leffler_e1(z: f64, rho: f64) -> Result<f64> {
    if !z.is_finite() || !rho.is_finite() {
        return Err(FracError::Domain(format!("mittag_leffler_e1({z}, {rho})")));
    }
    if z < 0.0 && rho > 0.0 {
        return Ok(mittag_leffler_e1_negative(z, rho));
    }
    // skip the leading terms that vanish at poles of Gamma
    let mut k0 = 0usize;
    while is_nonpositive_integer(k0 as f64 + rho) {
        k0 += 1;
    }
    let mut term = z.powi(k0 as i32) * recip_gamma(k0 as f64 + rho);
    let mut sum = 0.0;
    for k in k0..ML_MAX_TERMS {
        sum += term;
        if k + 1 - k0 >= ML_MIN_TERMS && term.abs() <= 1e-17 * sum.abs() {
            return Ok(sum);
        }
        term *= z / (k as f64 + rho);
        if !sum.is_finite() {
            return Err(FracError::Overflow(format!("mittag_leffler_e1({z}, {rho})")));
        }
    }
    Err(FracError::NonConvergence { terms: ML_MAX_TERMS })
}

/// Kummer's transformation `E_{1,rho}(z) = e^z 1F1(rho - 1; rho; -z) / Gamma(rho)`
/// for `z < 0`: the direct series alternates and cancels, this one does not.
fn mittag_leffler_e1_negative(z: f64, rho: f64) -> f64 {
    let x = -z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..ML_MAX_TERMS {
        let kf = k as f64;
        term *= (rho - 1.0 + kf) / (rho + kf) * x / (kf + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    z.exp() * sum * recip_gamma(rho)
}
