//! Scaled Wright functions ψ_{α,β}(t,s) = t^{β-1} W_{-α,β}(-s t^{-α}), stable
//! Lévy densities, the two-index kernel Ψ_{γ,α}, Mittag-Leffler kernels
//! m^a_{α,β}, and a verifier for the identities relating them.

mod identities;

pub use identities::{
    verify_psi_identity, Identity, IdentityParams, IdentityReport, PointResidual, RefinementStep, REFINEMENT_LEVELS,
};

use crate::error::{domain, Result};
use crate::quadrature::{bromwich_invert_real, integrate_semi_infinite, Integrand, QuadConfig};
use crate::special_fn::{mittag_leffler_with, neg_real_wright, EvalResult, FracParams};
use num_complex::Complex64;
use serde::Serialize;

/// Orders of ψ_{α,β}: 0 < α < 1, β ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiParams {
    pub alpha: f64,
    pub beta: f64,
}

impl PsiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = FracParams::scaled_wright(alpha, beta)?;
        Ok(Self { alpha: p.alpha, beta: p.beta })
    }
}

/// Orders and rate of m^a_{α,β}(t) = t^{β-1} E_{α,β}(a t^α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MLKernelParams {
    pub alpha: f64,
    pub beta: f64,
    pub a: Complex64,
}

impl MLKernelParams {
    pub fn new(alpha: f64, beta: f64, a: Complex64) -> Result<Self> {
        FracParams::mittag_leffler(alpha, beta)?;
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(domain("kernel rate a must be finite"));
        }
        Ok(Self { alpha, beta, a })
    }
}

/// ψ_{α,β}(t,s) with the default configuration.
pub fn psi(p: PsiParams, t: f64, s: f64) -> Result<EvalResult<f64>> {
    psi_with(p, t, s, &QuadConfig::default())
}

/// ψ_{α,β}(t,s). Series in x = s t^{-α} below 20, steepest-descent Hankel
/// integral beyond.
pub fn psi_with(p: PsiParams, t: f64, s: f64, cfg: &QuadConfig) -> Result<EvalResult<f64>> {
    check_ts(t, s)?;
    let x = s * t.powf(-p.alpha);
    let scale = t.powf(p.beta - 1.0);
    let w = neg_real_wright(p.alpha, p.beta, x, cfg)?;
    Ok(EvalResult {
        value: w.value * scale,
        abs_err_estimate: w.abs_err_estimate * scale,
        method: w.method,
        accuracy_warning: w.accuracy_warning,
    })
}

/// ψ_{α,β}(t,s) as the Bromwich inverse of λ^{-β} e^{-s λ^α} at t.
///
/// Independent of [`psi_with`]; used for cross-validation.
pub fn psi_bromwich(p: PsiParams, t: f64, s: f64, cfg: &QuadConfig) -> Result<EvalResult<f64>> {
    check_ts(t, s)?;
    let (a, b) = (p.alpha, p.beta);
    bromwich_invert_real(
        move |l: Complex64| {
            let ll = l.ln();
            (-b * ll - s * (a * ll).exp()).exp()
        },
        t,
        cfg,
    )
}

fn check_ts(t: f64, s: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(format!("t = {t} must be positive")));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(domain(format!("s = {s} must be nonnegative")));
    }
    Ok(())
}

/// Density f_{s,α}(t) = ψ_{α,0}(t,s) of the one-sided α-stable subordinator.
pub fn levy_density(alpha: f64, s: f64, t: f64) -> Result<EvalResult<f64>> {
    if !(s > 0.0) {
        return Err(domain(format!("s = {s} must be positive")));
    }
    psi(PsiParams::new(alpha, 0.0)?, t, s)
}

/// Rate and power of the super-exponential decay of s ↦ ψ_{α,β}(t,s):
/// exp(-(1-α) α^{α/(1-α)} (s t^{-α})^{1/(1-α)}).
pub(crate) fn psi_tail(alpha: f64, t: f64) -> (f64, f64) {
    let k = 1.0 / (1.0 - alpha);
    let c = (1.0 - alpha) * alpha.powf(alpha * k);
    (0.9 * c * t.powf(-alpha * k), k)
}

/// Ψ_{γ,α}(t,s) = ∫_0^∞ ψ_{γ,0}(t,u) ψ_{α,0}(s,u) du.
pub fn psi_capital(gamma: f64, alpha: f64, t: f64, s: f64) -> Result<EvalResult<f64>> {
    psi_capital_with(gamma, alpha, t, s, &QuadConfig::default())
}

pub fn psi_capital_with(gamma: f64, alpha: f64, t: f64, s: f64, cfg: &QuadConfig) -> Result<EvalResult<f64>> {
    let pg = PsiParams::new(gamma, 0.0)?;
    let pa = PsiParams::new(alpha, 0.0)?;
    if !(t > 0.0 && s > 0.0) {
        return Err(domain(format!("t = {t} and s = {s} must be positive")));
    }
    let (rate, power) = psi_tail(gamma, t);
    let it = Integrand::new(move |u: f64| {
        let a = psi_with(pg, t, u, cfg).map(|r| r.value).unwrap_or(f64::NAN);
        if a == 0.0 {
            return 0.0;
        }
        a * psi_with(pa, s, u, cfg).map(|r| r.value).unwrap_or(f64::NAN)
    })
    .decay(rate, power)
    .breakpoints(vec![t.powf(gamma), s.powf(alpha)]);
    integrate_semi_infinite(&it, cfg)
}

/// m^a_{α,β}(t) with the default configuration.
pub fn ml_kernel(p: MLKernelParams, t: f64) -> Result<EvalResult<Complex64>> {
    ml_kernel_with(p, t, &QuadConfig::default())
}

/// m^a_{α,β}(t) = t^{β-1} E_{α,β}(a t^α).
pub fn ml_kernel_with(p: MLKernelParams, t: f64, cfg: &QuadConfig) -> Result<EvalResult<Complex64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(format!("t = {t} must be positive")));
    }
    let scale = t.powf(p.beta - 1.0);
    let z = p.a * t.powf(p.alpha);
    let e = mittag_leffler_with(p.alpha, p.beta, z, cfg)?;
    Ok(EvalResult {
        value: e.value * scale,
        abs_err_estimate: e.abs_err_estimate * scale,
        method: e.method,
        accuracy_warning: e.accuracy_warning,
    })
}

/// Real-rate m^a_{α,β}(t).
pub(crate) fn ml_real(alpha: f64, beta: f64, a: f64, t: f64, cfg: &QuadConfig) -> Result<f64> {
    Ok(ml_kernel_with(MLKernelParams { alpha, beta, a: Complex64::new(a, 0.0) }, t, cfg)?.value.re)
}

pub(crate) fn psi_value(p: PsiParams, t: f64, s: f64, cfg: &QuadConfig) -> f64 {
    psi_with(p, t, s, cfg).map(|r| r.value).unwrap_or(f64::NAN)
}
