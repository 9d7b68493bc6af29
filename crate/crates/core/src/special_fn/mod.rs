//! Scalar special functions: g_γ, Mittag-Leffler E_{α,β} and Wright W_{λ,μ}.

mod gamma;
mod mittag_leffler;
mod wright;

pub use gamma::{gamma, ln_gamma, ln_rgamma_signed, rgamma, sin_pi};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_with, ml_series};
pub use wright::{wright, wright_f, wright_m, wright_series, wright_with};
pub(crate) use wright::neg_real_wright;

use crate::error::{domain, Result};
use num_complex::Complex64;
use serde::Serialize;

/// Which evaluation branch produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Contour,
    Asymptotic,
    Quadrature,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Series => "series",
            Method::Contour => "contour",
            Method::Asymptotic => "asymptotic",
            Method::Quadrature => "quadrature",
        };
        f.write_str(s)
    }
}

/// A value together with an absolute error estimate and the branch taken.
///
/// `accuracy_warning` is raised when the estimate exceeds the requested tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalResult<T> {
    pub value: T,
    pub abs_err_estimate: f64,
    pub method: Method,
    pub accuracy_warning: bool,
}

impl<T> EvalResult<T> {
    pub fn new(value: T, abs_err_estimate: f64, method: Method) -> Self {
        Self {
            value,
            abs_err_estimate,
            method,
            accuracy_warning: false,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> EvalResult<U> {
        EvalResult {
            value: f(self.value),
            abs_err_estimate: self.abs_err_estimate,
            method: self.method,
            accuracy_warning: self.accuracy_warning,
        }
    }

    pub(crate) fn flag(mut self, tol: f64, scale: f64) -> Self {
        self.accuracy_warning |= !(self.abs_err_estimate <= tol * scale.max(f64::MIN_POSITIVE));
        self
    }
}

/// Validated pair of fractional orders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FracParams {
    pub alpha: f64,
    pub beta: f64,
}

impl FracParams {
    /// Orders for a Mittag-Leffler function: α > 0, β > 0.
    pub fn mittag_leffler(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain(format!("alpha = {alpha} must be positive")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(domain(format!("beta = {beta} must be positive")));
        }
        Ok(Self { alpha, beta })
    }

    /// Orders for a scaled Wright function: 0 < α < 1, β ≥ 0.
    pub fn scaled_wright(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain(format!("alpha = {alpha} must lie in (0,1)")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(domain(format!("beta = {beta} must be nonnegative")));
        }
        Ok(Self { alpha, beta })
    }
}

/// g_γ(t) = t^{γ-1}/Γ(γ).
pub fn g_kernel(gamma: f64, t: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(domain(format!("gamma = {gamma} must be positive")));
    }
    if !(t > 0.0) {
        return Err(domain(format!("t = {t} must be positive")));
    }
    Ok(g_unchecked(gamma, t))
}

pub(crate) fn g_unchecked(gamma: f64, t: f64) -> f64 {
    if gamma == 1.0 {
        return 1.0;
    }
    if gamma > 150.0 {
        return ((gamma - 1.0) * t.ln() - ln_gamma(gamma)).exp();
    }
    t.powf(gamma - 1.0) * rgamma(gamma)
}

/// Rounds x onto an integer when it is within rounding distance of one, so that
/// computed arguments such as αn+β hit the zeros of 1/Γ exactly.
pub(crate) fn snap_to_pole(x: f64, magnitude: f64) -> f64 {
    let r = x.round();
    if r <= 0.0 && (x - r).abs() <= 8.0 * f64::EPSILON * magnitude.max(1.0) {
        r
    } else {
        x
    }
}

pub(crate) fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_kernel_values() {
        assert_eq!(g_kernel(1.0, 5.3).unwrap(), 1.0);
        assert!((g_kernel(2.0, 3.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((g_kernel(0.5, 1.0).unwrap() - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert!(g_kernel(0.0, 1.0).is_err());
        assert!(g_kernel(1.0, 0.0).is_err());
    }

    #[test]
    fn params_validate() {
        assert!(FracParams::mittag_leffler(0.5, 0.0).is_err());
        assert!(FracParams::scaled_wright(1.0, 0.5).is_err());
        assert!(FracParams::scaled_wright(0.5, 0.0).is_ok());
    }
}
