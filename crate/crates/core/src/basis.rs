//! Shifted Gegenbauer polynomials on `[0, 1]`, normalized so that
//! `G_j(1) = 1`, together with their derivatives, weighted norms and
//! leading coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::special::gamma_ratio;

/// Stability buffer above the `lambda = -1/2` singularity.
pub const LAMBDA_EPSILON: f64 = 1e-6;

/// A shifted Gegenbauer family (index `lambda`) truncated at degree `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisParams {
    lambda: f64,
    n: usize,
}

impl BasisParams {
    pub fn new(lambda: f64, n: usize) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { lambda, n })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `[G_0(x), ..., G_n(x)]`.
    pub fn eval(&self, x: f64) -> Result<Vec<f64>> {
        check_unit(x)?;
        Ok(sg_values(self.lambda, self.n, x))
    }

    /// `m`-th derivatives `[G_0^(m)(x), ..., G_n^(m)(x)]`; entries below `m`
    /// are zero and the rest use `G_j^(m) = chi_{j,m} G_{j-m}^{lambda+m}`.
    pub fn eval_mth_derivative(&self, m: usize, x: f64) -> Result<Vec<f64>> {
        check_unit(x)?;
        if m > self.n {
            return Err(FracError::Domain(format!(
                "derivative order {m} exceeds degree {}",
                self.n
            )));
        }
        let lower = sg_values(self.lambda + m as f64, self.n - m, x);
        let mut out = vec![0.0; self.n + 1];
        for j in m..=self.n {
            out[j] = sg_derivative_factor(j, m, self.lambda)? * lower[j - m];
        }
        Ok(out)
    }

    /// Weighted squared norms `int_0^1 G_j(x)^2 (x - x^2)^(lambda - 1/2) dx`.
    pub fn normalization(&self) -> Vec<f64> {
        (0..=self.n).map(|j| sg_norm(j, self.lambda)).collect()
    }

    /// Leading coefficients `K_j` of `G_j` in powers of `x`.
    pub fn leading_coefficients(&self) -> Vec<f64> {
        let mut k = Vec::with_capacity(self.n + 1);
        k.push(1.0);
        if self.n >= 1 {
            // G_1 = 2x - 1 for every lambda (limit of the ratio at lambda = 0)
            k.push(2.0);
        }
        for j in 1..self.n {
            let jf = j as f64;
            let next = 4.0 * (jf + self.lambda) / (jf + 2.0 * self.lambda) * k[j];
            k.push(next);
        }
        k
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > -0.5 + LAMBDA_EPSILON {
        Ok(())
    } else {
        Err(FracError::Domain(format!(
            "Gegenbauer index must exceed -1/2 + {LAMBDA_EPSILON:e}, got {lambda}"
        )))
    }
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(FracError::Domain(format!("point {x} lies outside [0, 1]")))
    }
}

/// Forward three-term recurrence
/// `(j + 2 lambda) G_{j+1} = 2 (j + lambda)(2x - 1) G_j - j G_{j-1}`.
///
/// No domain checks; callers validate `lambda` and `x`.
pub(crate) fn sg_values(lambda: f64, n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    sg_values_into(lambda, n, x, &mut out);
    out
}

pub(crate) fn sg_values_into(lambda: f64, n: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    let u = 2.0 * x - 1.0;
    out.push(1.0);
    if n == 0 {
        return;
    }
    out.push(u);
    for j in 1..n {
        let jf = j as f64;
        let next = (2.0 * (jf + lambda) * u * out[j] - jf * out[j - 1]) / (jf + 2.0 * lambda);
        out.push(next);
    }
}

/// Double-double arithmetic for [`sg_value_compensated`].
mod dd {
    #[derive(Clone, Copy)]
    pub struct Dd(pub f64, pub f64);

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }

    fn quick(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd(s, b - (s - a))
    }

    impl Dd {
        pub fn from_sum(a: f64, b: f64) -> Self {
            two_sum(a, b)
        }

        pub fn add(self, o: Self) -> Self {
            let Dd(s, e) = two_sum(self.0, o.0);
            quick(s, e + self.1 + o.1)
        }

        pub fn neg(self) -> Self {
            Dd(-self.0, -self.1)
        }

        pub fn mul(self, o: Self) -> Self {
            let p = self.0 * o.0;
            let e = self.0.mul_add(o.0, -p) + self.0 * o.1 + self.1 * o.0;
            quick(p, e)
        }

        pub fn div(self, o: Self) -> Self {
            let q1 = self.0 / o.0;
            let r = self.add(o.mul(Dd(q1, 0.0)).neg());
            quick(q1, r.0 / o.0)
        }
    }
}

/// `G_n^lambda(x)` with the recurrence carried in double-double arithmetic,
/// rounded once at the end. Slow; meant for residual checks.
pub fn sg_value_compensated(lambda: f64, n: usize, x: f64) -> f64 {
    use dd::Dd;
    let u = Dd::from_sum(2.0 * x, -1.0);
    if n == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (Dd(1.0, 0.0), u);
    for j in 1..n {
        let jf = j as f64;
        let a = Dd::from_sum(jf, lambda).mul(Dd(2.0, 0.0));
        let c = Dd::from_sum(jf, 2.0 * lambda);
        let next = a.mul(u).mul(cur).add(prev.mul(Dd(-jf, 0.0))).div(c);
        prev = cur;
        cur = next;
    }
    cur.0 + cur.1
}

/// `chi_{n,m}^lambda` with `d^m/dx^m G_n^lambda = chi G_{n-m}^{lambda+m}`.
pub fn sg_derivative_factor(n: usize, m: usize, lambda: f64) -> Result<f64> {
    if n < m {
        return Err(FracError::Domain(format!(
            "derivative factor needs n >= m, got n = {n}, m = {m}"
        )));
    }
    if m == 0 {
        return Ok(1.0);
    }
    let (nf, mf) = (n as f64, m as f64);
    gamma_ratio(
        &[nf + 1.0, lambda + 0.5, nf + mf + 2.0 * lambda],
        &[nf - mf + 1.0, nf + 2.0 * lambda, mf + lambda + 0.5],
    )
}

/// Squared weighted norm of `G_j^lambda` on `[0, 1]`:
/// `Gamma(lambda+1/2)^2 j! / (2 Gamma(j + 2 lambda) (j + lambda))`,
/// with the `j = 0` case written as `Gamma(lambda+1/2)^2 / Gamma(2 lambda + 1)`
/// so it stays regular at `lambda = 0`.
pub(crate) fn sg_norm(j: usize, lambda: f64) -> f64 {
    let h = lambda + 0.5;
    let v = if j == 0 {
        gamma_ratio(&[h, h], &[2.0 * lambda + 1.0])
    } else {
        let jf = j as f64;
        gamma_ratio(&[h, h, jf + 1.0], &[jf + 2.0 * lambda]).map(|r| r / (2.0 * (jf + lambda)))
    };
    v.expect("norm arguments are positive for lambda > -1/2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn params(lambda: f64, n: usize) -> BasisParams {
        BasisParams::new(lambda, n).unwrap()
    }

    #[test]
    fn rejects_lambda_at_singularity() {
        assert!(BasisParams::new(-0.5, 3).is_err());
        assert!(BasisParams::new(-0.5 + 1e-7, 3).is_err());
        assert!(BasisParams::new(-0.4, 3).is_ok());
        assert!(params(0.5, 2).eval(1.5).is_err());
    }

    #[test]
    fn endpoint_values() {
        assert_eq!(params(0.5, 2).eval(1.0).unwrap(), vec![1.0, 1.0, 1.0]);
        assert_eq!(params(0.5, 2).eval(0.0).unwrap(), vec![1.0, -1.0, 1.0]);
        for lambda in [-0.4, 0.0, 0.5, 1.0, 2.0] {
            let p = params(lambda, 25);
            let at1 = p.eval(1.0).unwrap();
            let at0 = p.eval(0.0).unwrap();
            for j in 0..=25 {
                assert_relative_eq!(at1[j], 1.0, max_relative = 1e-13);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                assert_relative_eq!(at0[j], sign, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn legendre_quadratic_by_hand() {
        // G_2^{1/2}(x) = 6x^2 - 6x + 1
        let v = params(0.5, 2).eval(0.25).unwrap();
        assert_relative_eq!(v[1], -0.5);
        assert_relative_eq!(v[2], -0.125, epsilon = 1e-15);
    }

    #[test]
    fn bounded_by_one_for_nonnegative_lambda() {
        for lambda in [0.0, 0.5, 1.0, 2.0] {
            let p = params(lambda, 20);
            for i in 0..=1000 {
                let x = i as f64 / 1000.0;
                assert!(p.eval(x).unwrap().iter().all(|g| g.abs() <= 1.0 + 1e-13));
            }
        }
    }

    #[test]
    fn derivative_factor_values() {
        assert_eq!(sg_derivative_factor(5, 0, 0.7).unwrap(), 1.0);
        assert_relative_eq!(sg_derivative_factor(2, 1, 0.5).unwrap(), 6.0, max_relative = 1e-14);
        // G_3^{1/2} = P_3(2x-1), leading coefficient 20, so the third derivative is 120
        assert_relative_eq!(sg_derivative_factor(3, 3, 0.5).unwrap(), 120.0, max_relative = 1e-14);
        assert!(sg_derivative_factor(1, 2, 0.5).is_err());
        // Chebyshev: d/dx T_n(2x-1) = 2 n^2 G_{n-1}^1
        for n in 1..10 {
            let nf = n as f64;
            assert_relative_eq!(
                sg_derivative_factor(n, 1, 0.0).unwrap(),
                2.0 * nf * nf,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn mth_derivative_entries() {
        let d = params(0.5, 3).eval_mth_derivative(1, 0.5).unwrap();
        assert_eq!(d[0], 0.0);
        assert!(d[2].abs() < 1e-15);
        let d = params(1.0, 4).eval_mth_derivative(2, 0.37).unwrap();
        assert_eq!((d[0], d[1]), (0.0, 0.0));
        assert!(params(1.0, 1).eval_mth_derivative(2, 0.3).is_err());
    }

    #[test]
    fn mth_derivative_matches_finite_difference() {
        let h = 1e-5;
        let p = params(0.0, 5);
        let d = p.eval_mth_derivative(1, 0.3).unwrap();
        let up = p.eval(0.3 + h).unwrap();
        let dn = p.eval(0.3 - h).unwrap();
        for j in 0..=5 {
            assert!((d[j] - (up[j] - dn[j]) / (2.0 * h)).abs() < 1e-6);
        }
        for lambda in [-0.4, 0.0, 0.5, 1.0, 2.0] {
            for n in 2..=8 {
                let p = params(lambda, n);
                for &x in &[0.2, 0.5, 0.77] {
                    let d1 = p.eval_mth_derivative(1, x).unwrap();
                    let d2 = p.eval_mth_derivative(2, x).unwrap();
                    let (gp, gm) = (p.eval(x + h).unwrap(), p.eval(x - h).unwrap());
                    let (dp, dm) = (
                        p.eval_mth_derivative(1, x + h).unwrap(),
                        p.eval_mth_derivative(1, x - h).unwrap(),
                    );
                    for j in 0..=n {
                        let fd1 = (gp[j] - gm[j]) / (2.0 * h);
                        assert!((d1[j] - fd1).abs() <= 1e-5 * (1.0 + d1[j].abs()), "m=1 j={j}");
                        let fd2 = (dp[j] - dm[j]) / (2.0 * h);
                        assert!((d2[j] - fd2).abs() <= 1e-5 * (1.0 + d2[j].abs()), "m=2 j={j}");
                    }
                }
            }
        }
    }

    /// Weighted integral of G_j^2 via x = (1 - cos t)/2, which turns
    /// `(x - x^2)^(lambda - 1/2) dx` into `(sin t / 2)^(2 lambda) dt`.
    fn norm_by_simpson(lambda: f64, j: usize) -> f64 {
        let steps = 20_000;
        let h = PI / steps as f64;
        let f = |t: f64| {
            let x = (1.0 - t.cos()) / 2.0;
            let g = sg_values(lambda, j, x)[j];
            g * g * (t.sin() / 2.0).powf(2.0 * lambda)
        };
        let mut s = f(0.0) + f(PI);
        for i in 1..steps {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn normalization_values() {
        let n = params(0.5, 2).normalization();
        assert_relative_eq!(n[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(n[1], 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(n[2], 0.2, max_relative = 1e-14);
        let c = params(0.0, 4).normalization();
        assert_relative_eq!(c[0], PI, max_relative = 1e-14);
        for v in &c[1..] {
            assert_relative_eq!(*v, PI / 2.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn normalization_matches_weighted_integrals() {
        for lambda in [0.0, 0.5, 1.0, 2.0, 1.1] {
            let norms = params(lambda, 6).normalization();
            for (j, &norm) in norms.iter().enumerate() {
                assert_relative_eq!(norm, norm_by_simpson(lambda, j), max_relative = 1e-9);
            }
        }
        // classical Gegenbauer norms rescaled to [0, 1], 40-digit mpmath
        let neg = params(-0.4, 3).normalization();
        assert_relative_eq!(neg[0], 19.714_639_489_050_166, max_relative = 1e-12);
        assert_relative_eq!(neg[2], 61.608_248_403_281_78, max_relative = 1e-12);
        assert_relative_eq!(neg[3], 94.781_920_620_433_52, max_relative = 1e-12);
        let two = params(2.0, 3).normalization();
        assert_relative_eq!(two[0], 0.073_631_077_818_510_78, max_relative = 1e-12);
        assert_relative_eq!(two[2], 0.003_681_553_890_925_539, max_relative = 1e-12);
        assert_relative_eq!(two[3], 0.001_472_621_556_370_215_6, max_relative = 1e-12);
    }

    #[test]
    fn leading_coefficient_values() {
        let k = params(0.5, 2).leading_coefficients();
        assert_eq!(k, vec![1.0, 2.0, 6.0]);
        let k = params(1.0, 2).leading_coefficients();
        assert_relative_eq!(k[2], 16.0 / 3.0, max_relative = 1e-15);
        let k = params(0.0, 4).leading_coefficients();
        // shifted Chebyshev T_n(2x-1) has leading coefficient 2^(2n-1)
        assert_eq!(k, vec![1.0, 2.0, 8.0, 32.0, 128.0]);
    }

    #[test]
    fn leading_coefficient_matches_top_derivative() {
        // d^n/dx^n G_n = n! K_n
        for lambda in [-0.4, 0.0, 0.7, 2.0] {
            let p = params(lambda, 7);
            let k = p.leading_coefficients();
            let mut fact = 1.0;
            for (n, &kn) in k.iter().enumerate().skip(1) {
                fact *= n as f64;
                assert_relative_eq!(
                    sg_derivative_factor(n, n, lambda).unwrap(),
                    fact * kn,
                    max_relative = 1e-12
                );
            }
        }
    }
}
