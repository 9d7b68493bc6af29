use super::series::{TimeGrid, TimeSeries};
use crate::error::{domain, Result};
use crate::quadrature::{gauss_jacobi, gauss_legendre};
use crate::special_fn::{g_kernel, ln_gamma, rgamma};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

const NODES: usize = 12;

/// Lagrange basis through `xs` evaluated at x.
fn lagrange(xs: &[f64], x: f64) -> [f64; 4] {
    let mut b = [1.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                b[i] *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
    }
    b
}

/// Derivatives at xs[at] of the Lagrange basis through xs.
fn lagrange_derivative(xs: &[f64], at: usize) -> Vec<f64> {
    let n = xs.len();
    let x = xs[at];
    (0..n)
        .map(|i| {
            let denom: f64 = (0..n).filter(|&j| j != i).map(|j| xs[i] - xs[j]).product();
            let mut s = 0.0;
            for l in (0..n).filter(|&l| l != i) {
                let prod: f64 = (0..n).filter(|&j| j != i && j != l).map(|j| x - xs[j]).product();
                s += prod;
            }
            s / denom
        })
        .collect()
}

/// W with (g_γ ∗ f)(t_k) ≈ Σ_m W[k,m] φ(t_m) for f(s) = s^p φ(s^ν), φ
/// interpolated by cubics in τ = s^ν and each cell integrated by a Gauss
/// rule carrying the endpoint singularities.
fn integral_weights(grid: TimeGrid, p: f64, nu: f64, gamma: f64) -> DMatrix<f64> {
    let n = grid.n;
    let h = grid.h;
    let tau: Vec<f64> = (1..=n).map(|m| (m as f64 * h).powf(nu)).collect();
    let rg = rgamma(gamma);
    let (xl, wl) = gauss_legendre(NODES);
    let b = (p + 1.0) / nu - 1.0;
    let a = gamma - 1.0;
    let (xf, wf) = gauss_jacobi(NODES, 0.0, b);
    let (xb, wb) = gauss_jacobi(NODES, a, b);
    let (xe, we) = gauss_jacobi(NODES, a, 0.0);
    let mut w = DMatrix::<f64>::zeros(n, n);
    let add = |w: &mut DMatrix<f64>, k: usize, j: usize, ts: f64, wt: f64| {
        let m0 = j.saturating_sub(1).clamp(1, n - 3);
        let base = lagrange(&tau[m0 - 1..m0 + 3], ts);
        for i in 0..4 {
            w[(k - 1, m0 - 1 + i)] += wt * base[i];
        }
    };
    let first = h.powf(p + 1.0) / nu;
    for k in 1..=n {
        let t = k as f64 * h;
        if k == 1 {
            let c = first * 2f64.powf(-b - 1.0 - a) * rg * h.powf(a);
            for i in 0..NODES {
                let u = 0.5 * (1.0 + xb[i]);
                let rho = -(u.ln() / nu).exp_m1() / (0.5 * (1.0 - xb[i]));
                add(&mut w, k, 0, h.powf(nu) * u, c * wb[i] * rho.powf(a));
            }
            continue;
        }
        let c = first * 2f64.powf(-b - 1.0);
        for i in 0..NODES {
            let u = 0.5 * (1.0 + xf[i]);
            let s = h * u.powf(1.0 / nu);
            add(&mut w, k, 0, h.powf(nu) * u, c * wf[i] * rg * (t - s).powf(a));
        }
        for j in 1..k - 1 {
            for i in 0..NODES {
                let off = 0.5 * (1.0 + xl[i]) * h;
                let s = j as f64 * h + off;
                let gap = (k - j) as f64 * h - off;
                add(&mut w, k, j, s.powf(nu), 0.5 * h * wl[i] * s.powf(p) * rg * gap.powf(a));
            }
        }
        let j = k - 1;
        let c = (0.5 * h).powf(gamma) * rg;
        for i in 0..NODES {
            let s = j as f64 * h + 0.5 * (1.0 + xe[i]) * h;
            add(&mut w, k, j, s.powf(nu), c * we[i] * s.powf(p));
        }
    }
    if nu < 1.0 {
        starting_weights(&mut w, &tau, h, p, nu, gamma);
    }
    w
}

const STARTING: usize = 6;

/// Corrections on the first samples making each row exact for φ = τ^j,
/// j < STARTING (the cubic rule is already exact for j < 4).
fn starting_weights(w: &mut DMatrix<f64>, tau: &[f64], h: f64, p: f64, nu: f64, gamma: f64) {
    let s = STARTING.min(tau.len());
    let scale = tau[s - 1];
    let v = DMatrix::from_fn(s, s, |j, i| (tau[i] / scale).powi(j as i32));
    let Some(inv) = v.try_inverse() else { return };
    for k in 0..tau.len() {
        let t = (k + 1) as f64 * h;
        let r = DVector::from_fn(s, |j, _| {
            let e = p + j as f64 * nu;
            let exact = gamma_ratio(e + 1.0, gamma) * t.powf(e + gamma) / scale.powi(j as i32);
            let rule: f64 = (0..tau.len()).map(|m| w[(k, m)] * (tau[m] / scale).powi(j as i32)).sum();
            exact - rule
        });
        let c = &inv * r;
        for i in 0..s {
            w[(k, i)] += c[i];
        }
    }
}

/// Γ(a)/Γ(a+γ).
fn gamma_ratio(a: f64, gamma: f64) -> f64 {
    (ln_gamma(a) - ln_gamma(a + gamma)).exp()
}

fn apply_weights(w: &DMatrix<f64>, phi: &[DVector<Complex64>]) -> Vec<DVector<Complex64>> {
    let n = phi.len();
    (0..n)
        .map(|k| {
            let mut acc = DVector::<Complex64>::zeros(phi[0].len());
            for m in 0..n {
                let c = w[(k, m)];
                if c != 0.0 {
                    acc.axpy(Complex64::new(c, 0.0), &phi[m], Complex64::new(1.0, 0.0));
                }
            }
            acc
        })
        .collect()
}

/// Samples divided by t^p (of f - f(0) when the initial value is set).
fn smooth_part(f: &TimeSeries, p: f64) -> Vec<DVector<Complex64>> {
    f.values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let scale = f.grid.t(k).powf(-p);
            match &f.initial {
                Some(x0) => (v - x0) * Complex64::new(scale, 0.0),
                None => v * Complex64::new(scale, 0.0),
            }
        })
        .collect()
}

/// Riemann-Liouville integral I^{-γ} f = g_γ ∗ f by product integration.
pub fn rl_integral(f: &TimeSeries, gamma: f64) -> Result<TimeSeries> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(domain(format!("gamma = {gamma} must be positive")));
    }
    let p = f.singular_exponent;
    let nu = f.expansion_exponent;
    let w = integral_weights(f.grid, p, nu, gamma);
    let mut values = apply_weights(&w, &smooth_part(f, p));
    let mut exponent = p + gamma;
    if let Some(x0) = &f.initial {
        for (k, v) in values.iter_mut().enumerate() {
            *v += x0 * Complex64::new(g_kernel(gamma + 1.0, f.grid.t(k))?, 0.0);
        }
        exponent = gamma;
    }
    let mut out = TimeSeries::new(f.grid, values, exponent)?.with_expansion(nu)?;
    out.labels = f.labels.clone();
    Ok(out)
}

/// d/dt of t^q χ(t^ν) sampled on the grid, with 5-point Lagrange
/// differentiation of χ in τ = t^ν. Returns the values and the largest
/// relative gap to a 3-point estimate.
fn differentiate(grid: TimeGrid, chi: &[DVector<Complex64>], q: f64, nu: f64) -> (Vec<DVector<Complex64>>, f64) {
    let n = grid.n;
    let tau: Vec<f64> = (0..n).map(|k| grid.t(k).powf(nu)).collect();
    let deriv = |k: usize, width: usize| -> DVector<Complex64> {
        let m0 = k.saturating_sub(width / 2).min(n - width);
        let d = lagrange_derivative(&tau[m0..m0 + width], k - m0);
        let mut acc = DVector::<Complex64>::zeros(chi[0].len());
        for (i, c) in d.iter().enumerate() {
            acc.axpy(Complex64::new(*c, 0.0), &chi[m0 + i], Complex64::new(1.0, 0.0));
        }
        acc
    };
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let t = grid.t(k);
        let dtau = nu * t.powf(nu - 1.0);
        let d5 = deriv(k, 5) * Complex64::new(dtau, 0.0);
        let d3 = deriv(k, 3) * Complex64::new(dtau, 0.0);
        let v = &chi[k] * Complex64::new(q * t.powf(q - 1.0), 0.0) + &d5 * Complex64::new(t.powf(q), 0.0);
        worst = worst.max((&d5 - &d3).norm() * t.powf(q));
        scale = scale.max(v.norm());
        out.push(v);
    }
    (out, if scale > 0.0 { worst / scale } else { 0.0 })
}

fn derivative_exponent(q: f64, nu: f64) -> f64 {
    if q.abs() < 1e-12 {
        q - 1.0 + nu
    } else {
        q - 1.0
    }
}

/// Relative gap between the 4th- and 2nd-order derivative estimates above
/// which the grid is reported as too coarse.
pub const COARSE_GRID_WARNING: f64 = 1e-2;

/// Riemann-Liouville derivative d/dt (g_{1-γ} ∗ f) for 0 < γ < 1.
pub fn rl_derivative(f: &TimeSeries, gamma: f64) -> Result<TimeSeries> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(domain(format!("gamma = {gamma} must lie in (0,1)")));
    }
    let i = rl_integral(f, 1.0 - gamma)?;
    let q = i.singular_exponent;
    let nu = i.expansion_exponent;
    let chi = smooth_part(&i, q);
    let (values, gap) = differentiate(f.grid, &chi, q, nu);
    if gap > COARSE_GRID_WARNING {
        log::warn!("RL derivative: finite-difference error estimate {gap:.2e} suggests the grid is too coarse");
    }
    let e = derivative_exponent(q, nu);
    if !(e > -1.0) {
        return Err(domain(format!("the derivative behaves like t^{e} at the origin and is not locally integrable")));
    }
    let mut out = TimeSeries::new(f.grid, values, e)?.with_expansion(nu)?;
    out.labels = f.labels.clone();
    Ok(out)
}

/// Caputo derivative g_{1-γ} ∗ f' for 0 < γ < 1. The series must carry f(0);
/// its singular exponent describes f - f(0).
pub fn caputo_derivative(f: &TimeSeries, gamma: f64) -> Result<TimeSeries> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(domain(format!("gamma = {gamma} must lie in (0,1)")));
    }
    if f.initial.is_none() {
        return Err(domain("the Caputo derivative needs f(0)"));
    }
    let p = f.singular_exponent;
    let nu = f.expansion_exponent;
    let chi = smooth_part(f, p);
    let (d, gap) = differentiate(f.grid, &chi, p, nu);
    if gap > COARSE_GRID_WARNING {
        log::warn!("Caputo derivative: finite-difference error estimate {gap:.2e} suggests the grid is too coarse");
    }
    let deriv = TimeSeries::new(f.grid, d, derivative_exponent(p, nu))?.with_expansion(nu)?;
    let mut out = rl_integral(&deriv, 1.0 - gamma)?;
    out.labels = f.labels.clone();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaled_wright::ml_real;
    use crate::QuadConfig;
    use std::f64::consts::PI;

    fn grid() -> TimeGrid {
        TimeGrid::up_to(2.0, 40).unwrap()
    }

    fn max_err(s: &TimeSeries, f: impl Fn(f64) -> f64, from: usize) -> f64 {
        (from..s.len()).map(|k| (s.values[k][0].re - f(s.grid.t(k))).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn integrals_of_kernels_are_exact() {
        let one = TimeSeries::from_fn(grid(), 0.0, |_| 1.0).unwrap();
        assert!(max_err(&rl_integral(&one, 1.0).unwrap(), |t| t, 0) < 1e-14);
        for &(b, g) in &[(0.3, 0.5), (0.5, 0.5), (1.5, 0.7), (0.8, 2.2)] {
            let f = TimeSeries::from_fn(grid(), b - 1.0, |t| g_kernel(b, t).unwrap()).unwrap();
            let i = rl_integral(&f, g).unwrap();
            assert!(max_err(&i, |t| g_kernel(b + g, t).unwrap(), 0) < 1e-13, "{b} {g}");
            assert!((i.singular_exponent - (b + g - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn semigroup_law_on_smooth_data() {
        let f = TimeSeries::from_fn(TimeGrid::up_to(2.0, 80).unwrap(), 0.0, |t| (-t).exp() * (3.0 * t).cos()).unwrap();
        let a = rl_integral(&rl_integral(&f, 0.3).unwrap(), 0.6).unwrap();
        let b = rl_integral(&f, 0.9).unwrap();
        for k in 0..f.len() {
            assert!((&a.values[k] - &b.values[k]).norm() < 1e-6, "{k}");
        }
    }

    #[test]
    fn rl_derivative_examples() {
        let g = grid();
        let f = TimeSeries::from_fn(g, -0.5, |t| g_kernel(0.5, t).unwrap()).unwrap();
        assert!(max_err(&rl_derivative(&f, 0.5).unwrap(), |_| 0.0, 0) < 1e-12);
        let f = TimeSeries::from_fn(g, 1.0, |t| t).unwrap();
        let d = rl_derivative(&f, 0.5).unwrap();
        assert!(max_err(&d, |t| 2.0 * (t / PI).sqrt(), 0) < 1e-6);
        let cfg = QuadConfig::default();
        let err = |n: usize| {
            let g = TimeGrid::up_to(2.0, n).unwrap();
            let m = TimeSeries::from_fn(g, -0.5, |t| ml_real(0.5, 0.5, -1.0, t, &cfg).unwrap())
                .unwrap()
                .with_expansion(0.5)
                .unwrap();
            let d = rl_derivative(&m, 0.5).unwrap();
            (n / 10..n).map(|k| (d.values[k][0].re + m.values[k][0].re).abs()).fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(40), err(80));
        assert!(coarse < 2e-3 && fine < 0.4 * coarse, "{coarse} {fine}");
    }

    #[test]
    fn caputo_examples() {
        let g = grid();
        let x0 = DVector::from_element(1, Complex64::new(2.0, 0.0));
        let c = TimeSeries::from_fn(g, 0.0, |_| 2.0).unwrap().with_initial(x0, 0.0).unwrap();
        assert!(max_err(&caputo_derivative(&c, 0.4).unwrap(), |_| 0.0, 0) < 1e-13);

        let cfg = QuadConfig::default();
        let one = DVector::from_element(1, Complex64::new(1.0, 0.0));
        let err = |n: usize| {
            let g = TimeGrid::up_to(2.0, n).unwrap();
            let e = TimeSeries::from_fn(g, 0.0, |t| ml_real(0.5, 1.0, -1.0, t, &cfg).unwrap())
                .unwrap()
                .with_expansion(0.5)
                .unwrap()
                .with_initial(one.clone(), 0.5)
                .unwrap();
            let d = caputo_derivative(&e, 0.5).unwrap();
            (n / 10..n).map(|k| (d.values[k][0].re + e.values[k][0].re).abs()).fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(40), err(80));
        assert!(coarse < 2e-3 && fine < 0.4 * coarse, "{coarse} {fine}");

        let fine = TimeGrid::up_to(2.0, 200).unwrap();
        let ex = TimeSeries::from_fn(fine, 0.0, |t| (-t).exp()).unwrap().with_initial(one, 0.0).unwrap();
        for &gamma in &[0.99, 0.999] {
            let d = caputo_derivative(&ex, gamma).unwrap();
            for k in 2..fine.n - 2 {
                let t = fine.t(k);
                let exact = -ml_real(1.0, 2.0 - gamma, -1.0, t, &cfg).unwrap();
                assert!((d.values[k][0].re - exact).abs() < 1e-5, "{gamma} {t}");
                if t >= 0.5 {
                    assert!((d.values[k][0].re + (-t).exp()).abs() < 1.0 - gamma, "{gamma} {t}");
                }
            }
        }
    }

    #[test]
    fn caputo_and_rl_agree_when_f_vanishes_at_zero() {
        let g = TimeGrid::up_to(1.5, 60).unwrap();
        let zero = DVector::from_element(1, Complex64::new(0.0, 0.0));
        let f = |t: f64| t * (-t).exp();
        let rl = rl_derivative(&TimeSeries::from_fn(g, 1.0, f).unwrap(), 0.6).unwrap();
        let cap = caputo_derivative(&TimeSeries::from_fn(g, 0.0, f).unwrap().with_initial(zero, 1.0).unwrap(), 0.6).unwrap();
        for k in 2..g.n - 2 {
            assert!((rl.values[k][0] - cap.values[k][0]).norm() < 1e-5, "{k}");
        }
    }

    #[test]
    fn inversion_of_integral() {
        let g = TimeGrid::up_to(2.0, 60).unwrap();
        let f = TimeSeries::from_fn(g, 0.0, |t| 1.0 + t.sin()).unwrap();
        let back = rl_derivative(&rl_integral(&f, 0.35).unwrap(), 0.35).unwrap();
        for k in 2..g.n - 2 {
            assert!((back.values[k][0].re - f.values[k][0].re).abs() < 1e-5, "{k}");
        }
    }
}
