use super::QuadConfig;
use crate::error::{domain, Result};
use crate::special_fn::{EvalResult, Method};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Parabolic Bromwich contour s(u) = μ(1+iu)², trapezoidal rule with step h on |u| ≤ nh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parabola {
    pub mu: f64,
    pub h: f64,
    pub n: usize,
}

impl Parabola {
    /// Fixed-contour parameters of Weideman and Trefethen for n nodes per half-line,
    /// scaled by 1/t.
    pub fn fixed(n: usize, t: f64) -> Self {
        let nf = n as f64;
        Self {
            mu: PI * nf / (12.0 * t),
            h: 3.0 / nf,
            n,
        }
    }

    /// (1/2πi)∫ e^{st} F(s) ds along the contour, plus the largest term and the
    /// magnitude at the truncation ends. `conj_symmetric` assumes F(s̄) = conj F(s)
    /// and sums one half only.
    pub fn sum<F: Fn(Complex64) -> Complex64>(
        &self,
        f: &F,
        t: f64,
        conj_symmetric: bool,
    ) -> (Complex64, f64, f64) {
        let term = |k: i64| {
            let u = k as f64 * self.h;
            let s = self.mu * Complex64::new(1.0 - u * u, 2.0 * u);
            let ds = 2.0 * self.mu * Complex64::new(-u, 1.0);
            (s * t).exp() * f(s) * ds
        };
        let n = self.n as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut big = 0.0f64;
        let t0 = term(0);
        big = big.max(t0.norm());
        let ends;
        if conj_symmetric {
            acc += Complex64::new(0.0, t0.im);
            for k in 1..=n {
                let v = term(k);
                big = big.max(v.norm());
                acc += Complex64::new(0.0, 2.0 * v.im);
            }
            ends = term(n).norm();
        } else {
            acc += t0;
            for k in 1..=n {
                let a = term(k);
                let b = term(-k);
                big = big.max(a.norm()).max(b.norm());
                acc += a + b;
            }
            ends = term(n).norm().max(term(-n).norm());
        }
        // (h/2πi) Σ: dividing by i maps Im to Re
        let v = acc * Complex64::new(0.0, -self.h / (2.0 * PI));
        (v, big * self.h / (2.0 * PI), ends * self.h / (2.0 * PI))
    }
}

fn invert<F: Fn(Complex64) -> Complex64>(
    f: &F,
    t: f64,
    cfg: &QuadConfig,
    conj_symmetric: bool,
) -> Result<EvalResult<Complex64>> {
    cfg.validate()?;
    if !(t > 0.0) {
        return Err(domain(format!("inversion time t = {t} must be positive")));
    }
    let mut n = cfg.contour_nodes / 2;
    let mut best: Option<EvalResult<Complex64>> = None;
    while 2 * n < cfg.max_nodes {
        let (v1, _, _) = Parabola::fixed(n, t).sum(f, t, conj_symmetric);
        let n2 = n + n / 2;
        let (v2, big, ends) = Parabola::fixed(n2, t).sum(f, t, conj_symmetric);
        let est = (v2 - v1).norm() + ends + 10.0 * f64::EPSILON * big;
        if !est.is_finite() {
            break;
        }
        let r = EvalResult::new(v2, est, Method::Contour).flag(cfg.rel_tol, v2.norm().max(cfg.abs_tol / cfg.rel_tol));
        let done = !r.accuracy_warning;
        if best.as_ref().is_none_or(|b| r.abs_err_estimate < b.abs_err_estimate) {
            best = Some(r);
        }
        if done {
            break;
        }
        n *= 2;
    }
    best.ok_or_else(|| crate::error::numerical("Bromwich integrand not finite on the contour"))
}

/// Inverse Laplace transform f(t) = (1/2πi)∫ e^{λt}F(λ)dλ on a fixed parabolic
/// contour. A warning flag marks results whose estimate misses the tolerance.
pub fn bromwich_invert<F: Fn(Complex64) -> Complex64>(
    f: F,
    t: f64,
    cfg: &QuadConfig,
) -> Result<EvalResult<Complex64>> {
    invert(&f, t, cfg, false)
}

/// As [`bromwich_invert`] for transforms with F(λ̄) = conj F(λ), whose inverse is real.
pub fn bromwich_invert_real<F: Fn(Complex64) -> Complex64>(
    f: F,
    t: f64,
    cfg: &QuadConfig,
) -> Result<EvalResult<f64>> {
    Ok(invert(&f, t, cfg, true)?.map(|v| v.re))
}
