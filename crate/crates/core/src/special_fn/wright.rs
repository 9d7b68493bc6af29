//! W_{λ,μ}(z): power series, and for λ = -α ∈ (-1,0) on the negative real axis
//! the Hankel integral taken along its steepest-descent path, which keeps
//! relative accuracy deep in the exp(-c x^{1/(1-α)}) tail.

use super::{c64, ln_gamma, ln_rgamma_signed, rgamma, snap_to_pole, EvalResult, Method};
use crate::error::{domain, Error, Result};
use crate::quadrature::{bromwich_invert, integrate, QuadConfig};
use num_complex::Complex64;
use std::f64::consts::PI;

const SERIES_LIMIT: f64 = 20.0;

/// W_{λ,μ}(z) with the default configuration.
pub fn wright(lambda: f64, mu: f64, z: Complex64) -> Result<EvalResult<Complex64>> {
    wright_with(lambda, mu, z, &QuadConfig::default())
}

/// W_{λ,μ}(z); the target relative accuracy is `cfg.abs_tol`.
pub fn wright_with(lambda: f64, mu: f64, z: Complex64, cfg: &QuadConfig) -> Result<EvalResult<Complex64>> {
    if !(lambda > -1.0 && lambda.is_finite()) {
        return Err(domain(format!("Wright lambda = {lambda} must exceed -1")));
    }
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(domain(format!("Wright mu = {mu} must be nonnegative")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(domain("Wright argument must be finite"));
    }
    let tol = cfg.abs_tol;
    if lambda < 0.0 && z.im == 0.0 && z.re <= 0.0 {
        return Ok(neg_real_wright(-lambda, mu, -z.re, cfg)?.map(c64));
    }
    if z.norm() == 0.0 {
        return Ok(EvalResult::new(c64(rgamma(mu)), 0.0, Method::Series));
    }
    let (v, err, converged) = wright_series(lambda, mu, z, 20_000);
    let series = EvalResult::new(v, if converged { err } else { f64::INFINITY }, Method::Series);
    if series.abs_err_estimate <= tol * v.norm() || lambda >= 0.0 {
        return Ok(series.flag(tol, v.norm()));
    }
    let alpha = -lambda;
    let inv_cfg = cfg.with_tol(tol, tol * 1e-3);
    let contour = bromwich_invert(
        move |s: Complex64| {
            let ls = s.ln();
            (-mu * ls + z * (alpha * ls).exp()).exp()
        },
        1.0,
        &inv_cfg,
    )?;
    let best = if contour.abs_err_estimate < series.abs_err_estimate { contour } else { series };
    let scale = best.value.norm();
    Ok(best.flag(tol, scale))
}

/// Σ z^n/(n! Γ(λn+μ)); reciprocal Gamma vanishes at the poles so those terms drop.
///
/// Terms are formed by recurrence while that stays in range and through
/// logarithms afterwards; the error estimate accounts for both.
pub fn wright_series(lambda: f64, mu: f64, z: Complex64, max_terms: usize) -> (Complex64, f64, bool) {
    series_bounded(lambda, mu, z, max_terms, f64::INFINITY)
}

/// As [`wright_series`], giving up once a term envelope exceeds `max_env`.
fn series_bounded(lambda: f64, mu: f64, z: Complex64, max_terms: usize, max_env: f64) -> (Complex64, f64, bool) {
    if z.norm() == 0.0 {
        return (c64(rgamma(mu)), 0.0, true);
    }
    let lz = z.norm().ln();
    let unit = z / z.norm();
    let real = z.im == 0.0;
    let mut phase = c64(1.0);
    let mut pow = c64(1.0); // z^n / n!
    let mut sum = c64(0.0);
    let mut err = 0.0;
    let mut prev = f64::INFINITY;
    for n in 0..max_terms {
        let nf = n as f64;
        let x = snap_to_pole(lambda * nf + mu, lambda.abs() * nf + mu);
        let rg = rgamma(x);
        let direct = pow.norm() > 1e-280 && pow.norm() < 1e280 && rg.is_finite();
        let term = if direct {
            pow * rg
        } else {
            let (lrg, sign) = ln_rgamma_signed(x);
            if sign == 0.0 {
                c64(0.0)
            } else {
                let la = nf * lz - ln_gamma(nf + 1.0) + lrg;
                err += f64::EPSILON * (la.abs() + nf * lz.abs()) * la.exp();
                phase * (sign * la.exp())
            }
        };
        sum += term;
        err += f64::EPSILON * (2.0 + nf.sqrt()) * term.norm();
        // decay test on the envelope: near poles of Γ single terms are accidentally small
        let lenv = if x < 0.5 { ln_gamma(1.0 - x) - PI.ln() } else { -ln_gamma(x) };
        let env = (nf * lz - ln_gamma(nf + 1.0) + lenv).exp();
        if !sum.norm().is_finite() || env > max_env {
            break;
        }
        if n > 2 && env <= prev && env <= 0.25 * f64::EPSILON * sum.norm().max(f64::MIN_POSITIVE) {
            return (sum, err + env, true);
        }
        prev = env;
        phase = if real { phase * unit.re.signum() } else { phase * unit };
        pow = pow * z / (nf + 1.0);
    }
    (sum, f64::INFINITY, false)
}

/// W_{-α,β}(-x) for 0 < α < 1, x ≥ 0.
pub(crate) fn neg_real_wright(alpha: f64, beta: f64, x: f64, cfg: &QuadConfig) -> Result<EvalResult<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha = {alpha} must lie in (0,1)")));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(domain(format!("argument -{x} must be finite and nonpositive")));
    }
    let tol = cfg.abs_tol;
    if x == 0.0 {
        return Ok(EvalResult::new(rgamma(beta), 0.0, Method::Series));
    }
    let mut series = None;
    if x < SERIES_LIMIT {
        // terms far above the result cannot meet the tolerance after cancellation
        let max_env = 10.0 * rgamma(beta).abs().max(1.0) * tol / f64::EPSILON;
        let (v, err, converged) = series_bounded(-alpha, beta, c64(-x), 20_000, max_env);
        if converged && err <= tol * v.re.abs() {
            return Ok(EvalResult::new(v.re, err, Method::Series));
        }
        if converged {
            series = Some(EvalResult::new(v.re, err, Method::Series));
        }
    }
    let path = steepest_descent(alpha, beta, x, tol)?;
    match series {
        Some(s) if s.abs_err_estimate < path.abs_err_estimate => {
            let scale = s.value.abs();
            Ok(s.flag(tol, scale))
        }
        _ => {
            let scale = path.value.abs();
            Ok(path.flag(tol, scale))
        }
    }
}

struct Path {
    alpha: f64,
    beta: f64,
    lx: f64,
}

impl Path {
    /// (ln r, φ, r'/r) at θ ∈ [0, π).
    fn at(&self, theta: f64) -> (f64, f64, f64) {
        let a = self.alpha;
        let ratio = if theta == 0.0 { a } else { (a * theta).sin() / theta.sin() };
        let lr = (self.lx + ratio.ln()) / (1.0 - a);
        let r = lr.exp();
        let rpa = (self.lx + a * lr).exp();
        let phi = r * theta.cos() - rpa * (a * theta).cos();
        let d = if theta < 1e-2 {
            let t2 = theta * theta;
            theta * ((1.0 - a * a) / 3.0 + t2 * ((1.0 - a.powi(4)) / 45.0 + t2 * 2.0 * (1.0 - a.powi(6)) / 945.0))
        } else {
            a / (a * theta).tan() - 1.0 / theta.tan()
        };
        (lr, phi, d / (1.0 - a))
    }

    fn log_integrand(&self, theta: f64) -> (f64, f64) {
        let (lr, phi, rho) = self.at(theta);
        let b1 = 1.0 - self.beta;
        let amp = rho * (b1 * theta).sin() + (b1 * theta).cos();
        (phi + b1 * lr, amp / PI)
    }
}

fn steepest_descent(alpha: f64, beta: f64, x: f64, tol: f64) -> Result<EvalResult<f64>> {
    let path = Path { alpha, beta, lx: x.ln() };
    // saddle radius r0 with φ(0) = -r0 (1-α)/α
    let lr0 = (path.lx + alpha.ln()) / (1.0 - alpha);
    let (e0, _) = path.log_integrand(0.0);
    if lr0 > 700.0 || !(e0 >= -760.0) {
        return Ok(EvalResult::new(0.0, 0.0, Method::Asymptotic));
    }
    let (_, phi0, _) = path.at(0.0);
    let drop = |th: f64| phi0 - path.at(th).1;
    // θ where φ has fallen by `target` below its saddle value
    let find = |target: f64| {
        let (mut lo, mut hi) = (0.0, PI);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if drop(m) < target {
                lo = m;
            } else {
                hi = m;
            }
            if hi - lo < 1e-3 * hi {
                break;
            }
        }
        hi
    };
    let th1 = find(1.0);
    let th_end = find(50.0 - tol.ln().min(0.0) * 0.5);
    let mut pts = vec![0.0];
    let mut p = th1;
    while p < th_end {
        pts.push(p);
        p *= 2.0;
    }
    pts.push(th_end);
    let f = |th: f64| {
        let (le, amp) = path.log_integrand(th);
        let d = le - e0;
        if d < -745.0 {
            0.0
        } else {
            d.exp() * amp
        }
    };
    let cfg = QuadConfig::default().with_tol(0.1 * tol, 1e-300);
    let r = match integrate(f, &pts, &cfg) {
        Err(Error::NoConvergence { .. }) => integrate(f, &pts, &cfg.with_tol(1e-9, 1e-300).with_max_nodes(16_384))?,
        r => r?,
    };
    let scale = e0.exp();
    // rounding in φ enters through exp(φ)
    let round = 8.0 * f64::EPSILON * (phi0.abs() + 1.0);
    let value = r.value * scale;
    let err = (r.abs_err_estimate + round * r.value.abs()) * scale;
    Ok(EvalResult::new(value, err, Method::Contour))
}

/// M_α(x) = W_{-α,1-α}(-x).
pub fn wright_m(alpha: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain(format!("x = {x} must be nonnegative")));
    }
    Ok(neg_real_wright(alpha, 1.0 - alpha, x, &QuadConfig::default())?.value)
}

/// F_α(x) = W_{-α,0}(-x), computed as α·x·M_α(x).
pub fn wright_f(alpha: f64, x: f64) -> Result<f64> {
    Ok(alpha * x * wright_m(alpha, x)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_and_half_order() {
        assert!((wright(-0.4, 1.3, c64(0.0)).unwrap().value.re - rgamma(1.3)).abs() < 1e-16);
        let r = wright(-0.5, 0.5, c64(-2.0)).unwrap();
        let exact = (-1f64).exp() / PI.sqrt();
        assert!((r.value.re - exact).abs() < 1e-15);
        assert!((wright_m(0.5, 2.0).unwrap() - exact).abs() < 1e-15);
        assert_eq!(wright_f(0.3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn series_and_path_agree() {
        let cfg = QuadConfig::default();
        for (a, b, x) in [(0.5, 0.5, 3.0), (0.3, 0.7, 1.5), (0.7, 0.0, 4.0), (0.8, 1.3, 6.0), (0.25, 0.75, 9.0)] {
            let (s, err, ok) = wright_series(-a, b, c64(-x), 10_000);
            let p = steepest_descent(a, b, x, cfg.abs_tol).unwrap().value;
            assert!(ok);
            assert!((s.re - p).abs() < 1e-12 * p.abs() + 2.0 * err, "{a} {b} {x}: {s} {p} {err}");
        }
    }

    #[test]
    fn gaussian_tail() {
        for x in [20.0, 25.0, 31.6] {
            let r = wright(-0.5, 0.5, c64(-x)).unwrap();
            let exact = (-x * x / 4.0).exp() / PI.sqrt();
            assert!(((r.value.re - exact) / exact).abs() < 1e-11, "{x}");
            assert_eq!(r.method, Method::Contour);
        }
    }

    #[test]
    fn derivative_relation() {
        let (l, m) = (-0.4, 0.9);
        let z = c64(-1.3);
        let h = 1e-4;
        let fd = (wright(l, m, z + h).unwrap().value - wright(l, m, z - h).unwrap().value) / (2.0 * h);
        let d = wright(l, l + m, z).unwrap().value;
        assert!((fd - d).norm() < 1e-8);
    }

    #[test]
    fn complex_argument_contour() {
        let z = Complex64::new(-12.0, 9.0);
        // mpmath, 60 digits
        let exact = Complex64::new(30.743_092_242_312_858, -47.711_426_473_980_494);
        let r = wright(-0.6, 0.8, z).unwrap();
        assert!((r.value - exact).norm() < 1e-10 * exact.norm(), "{:?}", r);
    }
}
