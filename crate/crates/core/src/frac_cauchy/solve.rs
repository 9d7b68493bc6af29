use super::calculus::{caputo_derivative, rl_derivative, rl_integral};
use super::series::{TimeGrid, TimeSeries};
use crate::error::{domain, Result};
use crate::quadrature::{integrate_semi_infinite, Integrand, QuadConfig};
use crate::resolvent::{base_family, Generator, OperatorFamily};
use crate::scaled_wright::{ml_kernel_with, psi_capital_with, MLKernelParams};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// Generator, order and datum of a fractional Cauchy problem.
#[derive(Debug, Clone)]
pub struct CauchyProblem {
    pub generator: Arc<Generator>,
    pub alpha: f64,
    pub x: DVector<Complex64>,
}

impl CauchyProblem {
    pub fn new(generator: Arc<Generator>, alpha: f64, x: DVector<Complex64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain(format!("alpha = {alpha} must lie in (0,1)")));
        }
        if x.len() != generator.dim() {
            return Err(domain(format!("datum has length {}, generator dimension is {}", x.len(), generator.dim())));
        }
        if generator.growth_bound > 0.0 {
            return Err(domain("the base semigroup must be uniformly bounded (spectral abscissa <= 0)"));
        }
        Ok(Self { generator, alpha, x })
    }

    fn labels(&self) -> Vec<String> {
        match self.generator.grid() {
            Some(g) if g.ndim() == 1 => (0..g.len()).map(|k| format!("x={}", g.point(k)[0])).collect(),
            _ if self.x.len() == 1 => vec!["v".into()],
            _ => (0..self.x.len()).map(|i| format!("v{i}")).collect(),
        }
    }
}

fn sample(grid: TimeGrid, f: impl Fn(f64) -> Result<DVector<Complex64>> + Sync) -> Result<Vec<DVector<Complex64>>> {
    grid.times().par_iter().map(|&t| f(t)).collect()
}

/// RL problem _RD^α v = A v, (g_{1-α} ∗ v)(0) = x, solved by
/// v(t) = ∫_0^∞ ψ_{α,0}(t,s) T(s)x ds.
pub fn solve_rl(problem: &CauchyProblem, grid: TimeGrid, cfg: &QuadConfig) -> Result<TimeSeries> {
    check_resolution(problem, grid);
    let fam = base_family(problem.generator.clone()).subordinated(problem.alpha, 0.0)?;
    let values = sample(grid, |t| fam.apply_vec(t, &problem.x, cfg))?;
    TimeSeries::new(grid, values, problem.alpha - 1.0)?
        .with_expansion(problem.alpha)?
        .with_labels(problem.labels())
}

/// Steps per relaxation time |λ|^{-1/α} of the fastest mode below which the
/// solution is reported as under-resolved.
pub const MIN_STEPS_PER_RELAXATION: f64 = 10.0;

fn check_resolution(problem: &CauchyProblem, grid: TimeGrid) {
    let fastest = problem.generator.spectrum().iter().map(|l| l.norm()).fold(0.0, f64::max);
    if fastest > 0.0 {
        let relaxation = fastest.powf(-1.0 / problem.alpha);
        if grid.h * MIN_STEPS_PER_RELAXATION > relaxation {
            log::warn!(
                "time step {:.3e} does not resolve the relaxation time {relaxation:.3e} of the fastest mode; derivative residuals will be large",
                grid.h
            );
        }
    }
}

/// RL problem of order γ for -(-A)^α: v(t) = t^{γ-1} E_{γ,γ}(-(-A)^α t^γ) x, with
/// the fractional power taken spectrally.
pub fn solve_rl_fracpower(problem: &CauchyProblem, gamma: f64, grid: TimeGrid, cfg: &QuadConfig) -> Result<TimeSeries> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(domain(format!("gamma = {gamma} must lie in (0,1)")));
    }
    let alpha = problem.alpha;
    let xm = DMatrix::from_column_slice(problem.x.len(), 1, problem.x.as_slice());
    let values = sample(grid, |t| {
        let y = problem.generator.spectral_apply(&xm, |l| {
            let rate = -(-l).powf(alpha);
            Ok(ml_kernel_with(MLKernelParams::new(gamma, gamma, rate)?, t, cfg)?.value)
        })?;
        Ok(y.column(0).clone_owned())
    })?;
    TimeSeries::new(grid, values, gamma - 1.0)?
        .with_expansion(gamma)?
        .with_labels(problem.labels())
}

/// ∫_0^∞ Ψ_{γ,α}(t,s) T(s)x ds by quadrature; needs a strictly negative
/// spectral abscissa so that the integral converges exponentially.
pub fn fracpower_by_quadrature(problem: &CauchyProblem, gamma: f64, t: f64, cfg: &QuadConfig) -> Result<DVector<Complex64>> {
    let abscissa = problem.generator.spectrum().iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    if !(abscissa < 0.0) {
        return Err(domain("the quadrature path needs a spectral abscissa below zero"));
    }
    let (g, a, x) = (gamma, problem.alpha, &problem.x);
    let slot = std::sync::Mutex::new(None);
    let it = Integrand::new(|s: f64| {
        let w = psi_capital_with(g, a, t, s, cfg).map(|r| r.value);
        let tx = DMatrix::from_column_slice(x.len(), 1, x.as_slice());
        match w.and_then(|w| Ok(problem.generator.semigroup(s, &tx)? * Complex64::new(w, 0.0))) {
            Ok(v) => v.column(0).clone_owned(),
            Err(e) => {
                slot.lock().unwrap_or_else(|p| p.into_inner()).get_or_insert(e);
                DVector::from_element(x.len(), Complex64::new(f64::NAN, 0.0))
            }
        }
    })
    .decay(-abscissa, 1.0)
    .breakpoints(vec![t.powf(gamma / a)]);
    let r = integrate_semi_infinite(&it, cfg);
    if let Some(e) = slot.into_inner().unwrap_or_else(|p| p.into_inner()) {
        return Err(e);
    }
    Ok(r?.value)
}

/// Caputo solution v = g_{1-α} ∗ u of an RL solution u.
pub fn rl_to_caputo(u: &TimeSeries, alpha: f64) -> Result<TimeSeries> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("alpha = {alpha} must lie in (0,1)")));
    }
    if (u.singular_exponent - (alpha - 1.0)).abs() > 1e-12 {
        log::warn!("rl_to_caputo: input exponent {} differs from alpha - 1 = {}", u.singular_exponent, alpha - 1.0);
    }
    rl_integral(u, 1.0 - alpha)
}

/// Caputo problem _CD^α v = A v, v(0) = x, through the RL solution.
pub fn solve_caputo(problem: &CauchyProblem, grid: TimeGrid, cfg: &QuadConfig) -> Result<TimeSeries> {
    let u = solve_rl(problem, grid, cfg)?;
    rl_to_caputo(&u, problem.alpha)?.with_initial(problem.x.clone(), problem.alpha)
}

#[derive(Debug, Clone, Serialize)]
pub struct OdeResidual {
    pub t: Vec<f64>,
    /// ‖D v(t) - A v(t)‖ / ‖v(t)‖.
    pub residual: Vec<f64>,
    /// Largest residual with the first and last two times left out.
    pub max_interior: f64,
}

fn residual_of(v: &TimeSeries, d: &TimeSeries, a: &Generator) -> Result<OdeResidual> {
    let mut residual = Vec::with_capacity(v.len());
    for k in 0..v.len() {
        let vk = DMatrix::from_column_slice(v.dim(), 1, v.values[k].as_slice());
        let av = a.apply(&vk)?;
        let dk = DMatrix::from_column_slice(v.dim(), 1, d.values[k].as_slice());
        residual.push((dk - av).norm() / vk.norm().max(f64::MIN_POSITIVE));
    }
    let n = residual.len();
    let max_interior = residual[2..n - 2].iter().copied().fold(0.0, f64::max);
    Ok(OdeResidual { t: v.times(), residual, max_interior })
}

/// Residual of _RD^α v = A v.
pub fn rl_residual(v: &TimeSeries, a: &Generator, alpha: f64) -> Result<OdeResidual> {
    residual_of(v, &rl_derivative(v, alpha)?, a)
}

/// Residual of _CD^α v = A v; v must carry its initial value.
pub fn caputo_residual(v: &TimeSeries, a: &Generator, alpha: f64) -> Result<OdeResidual> {
    residual_of(v, &caputo_derivative(v, alpha)?, a)
}

/// Residual of _RD^γ v = -(-A)^α v, the power taken spectrally.
pub fn fracpower_residual(v: &TimeSeries, problem: &CauchyProblem, gamma: f64) -> Result<OdeResidual> {
    let d = rl_derivative(v, gamma)?;
    let alpha = problem.alpha;
    let mut residual = Vec::with_capacity(v.len());
    for k in 0..v.len() {
        let vk = DMatrix::from_column_slice(v.dim(), 1, v.values[k].as_slice());
        let av = problem.generator.spectral_apply(&vk, |l| Ok(-(-l).powf(alpha)))?;
        let dk = DMatrix::from_column_slice(v.dim(), 1, d.values[k].as_slice());
        residual.push((dk - av).norm() / vk.norm().max(f64::MIN_POSITIVE));
    }
    let n = residual.len();
    let max_interior = residual[2..n - 2].iter().copied().fold(0.0, f64::max);
    Ok(OdeResidual { t: v.times(), residual, max_interior })
}

/// t^{α-1} E_{α,α}(t^α A) x evaluated spectrally.
pub fn rl_closed_form(problem: &CauchyProblem, grid: TimeGrid, cfg: &QuadConfig) -> Result<TimeSeries> {
    let alpha = problem.alpha;
    let xm = DMatrix::from_column_slice(problem.x.len(), 1, problem.x.as_slice());
    let values = sample(grid, |t| {
        let y = problem
            .generator
            .spectral_apply(&xm, |l| Ok(ml_kernel_with(MLKernelParams::new(alpha, alpha, l)?, t, cfg)?.value))?;
        Ok(y.column(0).clone_owned())
    })?;
    TimeSeries::new(grid, values, alpha - 1.0)?.with_expansion(alpha)?.with_labels(problem.labels())
}

/// ‖(g_{1-α} ∗ v)(t) - x‖/‖x‖ on t = 2^{-k}, k = 1..=k_max, for the RL solution v.
pub fn rl_initial_limit(problem: &CauchyProblem, k_max: u32, cfg: &QuadConfig) -> Result<Vec<(f64, f64)>> {
    let fam: OperatorFamily = base_family(problem.generator.clone()).subordinated(problem.alpha, 1.0 - problem.alpha)?;
    let nx = problem.x.norm();
    (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let t = 0.5f64.powi(k as i32);
            Ok((t, (fam.apply_vec(t, &problem.x, cfg)? - &problem.x).norm() / nx))
        })
        .collect()
}

/// Largest ratio ‖v(x + δ) - v(x)‖ / ‖δ‖ over three datum perturbations and
/// the grid times.
pub fn datum_sensitivity(problem: &CauchyProblem, grid: TimeGrid, cfg: &QuadConfig) -> Result<f64> {
    let base = solve_rl(problem, grid, cfg)?;
    let n = problem.x.len();
    let mut worst = 0.0f64;
    for i in 0..3 {
        let mut d = DVector::<Complex64>::zeros(n);
        d[i % n] = Complex64::new(1e-3 * (i + 1) as f64, 0.0);
        let p = CauchyProblem { x: &problem.x + &d, ..problem.clone() };
        let v = solve_rl(&p, grid, cfg)?;
        for k in 0..grid.n {
            let scale = crate::special_fn::g_kernel(problem.alpha, grid.t(k))?;
            worst = worst.max((&v.values[k] - &base.values[k]).norm() / (d.norm() * scale));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolvent::{Grid, SymbolTag};
    use crate::scaled_wright::ml_real;
    use crate::special_fn::g_kernel;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    fn scalar(a: f64, alpha: f64) -> CauchyProblem {
        CauchyProblem::new(Arc::new(Generator::from_rows(&[vec![a]]).unwrap()), alpha, DVector::from_element(1, c(1.0)))
            .unwrap()
    }

    #[test]
    fn zero_generator() {
        let g = TimeGrid::up_to(2.0, 20).unwrap();
        let p = scalar(0.0, 0.5);
        let v = solve_rl(&p, g, &cfg()).unwrap();
        for k in 0..g.n {
            assert!((v.values[k][0].re - g_kernel(0.5, g.t(k)).unwrap()).abs() < 1e-10);
        }
        let w = rl_to_caputo(&v, 0.5).unwrap();
        for k in 0..g.n {
            assert!((w.values[k][0].re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn scalar_rl_and_caputo() {
        let p = scalar(-1.0, 0.5);
        let run = |n: usize| {
            let g = TimeGrid::up_to(2.0, n).unwrap();
            let v = solve_rl(&p, g, &cfg()).unwrap();
            let cv = solve_caputo(&p, g, &cfg()).unwrap();
            let mut err = 0.0f64;
            for k in 0..g.n {
                let t = g.t(k);
                assert!((v.values[k][0].re - ml_real(0.5, 0.5, -1.0, t, &cfg()).unwrap()).abs() < 1e-9);
                if t >= 0.2 {
                    err = err.max((cv.values[k][0].re - ml_real(0.5, 1.0, -1.0, t, &cfg()).unwrap()).abs());
                }
            }
            let r1 = rl_residual(&v, &p.generator, 0.5).unwrap().max_interior;
            let r2 = caputo_residual(&cv, &p.generator, 0.5).unwrap().max_interior;
            (err, r1, r2)
        };
        let (e1, a1, b1) = run(40);
        let (e2, a2, b2) = run(80);
        assert!(e1 < 1e-3 && e2 < 0.5 * e1, "{e1} {e2}");
        assert!(a1 < 1e-3 && a2 < 0.5 * a1, "{a1} {a2}");
        assert!(b1 < 1e-3 && b2 < 0.5 * b1, "{b1} {b2}");
        let lim = rl_initial_limit(&p, 8, &cfg()).unwrap();
        assert!(lim.windows(2).all(|w| w[1].1 < w[0].1) && lim.last().unwrap().1 < 0.1, "{lim:?}");
    }

    #[test]
    fn fracpower_paths_agree() {
        let p = scalar(-1.0, 0.5);
        let g = TimeGrid::up_to(1.0, 5).unwrap();
        let v = solve_rl_fracpower(&p, 0.4, g, &cfg()).unwrap();
        let q = fracpower_by_quadrature(&p, 0.4, g.t(4), &cfg()).unwrap();
        assert!((v.values[4][0] - q[0]).norm() < 1e-7, "{} {}", v.values[4][0], q[0]);

        let grid = Grid::closed_1d(9, -0.4, 0.4).unwrap();
        let lap = Arc::new(Generator::from_symbol(grid.clone(), SymbolTag::LaplacianSymbol).unwrap());
        let x = DVector::from_fn(grid.len(), |k, _| c(1.0 - grid.point(k)[0].powi(2)));
        let prob = CauchyProblem::new(lap, 0.5, x.clone()).unwrap();
        let v = solve_rl_fracpower(&prob, 0.6, g, &cfg()).unwrap();
        for k in 0..grid.len() {
            let r = 2.0 * std::f64::consts::PI * grid.radius(k);
            let want = ml_real(0.6, 0.6, -r, g.t(2), &cfg()).unwrap() * x[k].re;
            assert!((v.values[2][k].re - want).abs() < 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn multiplication_closed_form() {
        let grid = Grid::closed_1d(7, -0.3, 0.3).unwrap();
        let gen = Arc::new(Generator::from_symbol(grid.clone(), SymbolTag::LaplacianSymbol).unwrap());
        let x = DVector::from_fn(grid.len(), |k, _| c((-grid.point(k)[0].powi(2)).exp()));
        let prob = CauchyProblem::new(gen.clone(), 0.5, x.clone()).unwrap();
        let g = TimeGrid::up_to(2.0, 20).unwrap();
        let v = solve_rl(&prob, g, &cfg()).unwrap();
        for j in 0..g.n {
            for k in 0..grid.len() {
                let q = gen.spectrum()[k].re;
                let want = ml_real(0.5, 0.5, q, g.t(j), &cfg()).unwrap() * x[k].re;
                assert!((v.values[j][k].re - want).abs() <= 1e-5 * want.abs(), "{j} {k}");
            }
        }
    }
}
