use super::family::{base_family, ErrorSlot, FamilyKind, OperatorFamily};
use super::generator::Generator;
use crate::error::{domain, numerical, Result};
use crate::quadrature::{convolve_finite, integrate_endpoints, laplace_numeric, Integrand, QuadConfig};
use crate::scaled_wright::{ml_kernel_with, MLKernelParams};
use crate::special_fn::g_kernel;
use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// Tolerance of the resolvent equation for matrix generators.
pub const MATRIX_RESOLVENT_TOL: f64 = 1e-7;
/// Tolerance of the resolvent equation for grid generators.
pub const GRID_RESOLVENT_TOL: f64 = 1e-4;

fn l2(v: &DMatrix<Complex64>) -> f64 {
    v.norm()
}

fn column(x: &DVector<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(x.len(), 1, x.as_slice())
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolventPoint {
    pub t: f64,
    pub residual: f64,
    pub norm: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolventReport {
    pub family: String,
    pub eta1: f64,
    pub eta2: f64,
    pub points: Vec<ResolventPoint>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Relative residual ‖S(t)x - g_β(t)x - A(g_α ∗ S(·)x)(t)‖ / ‖S(t)x‖ of the
/// integral equation, with (α, β) the orders of the family.
pub fn verify_resolvent_equation(
    f: &OperatorFamily,
    a: &Generator,
    t_grid: &[f64],
    x: &DVector<Complex64>,
    cfg: &QuadConfig,
) -> Result<ResolventReport> {
    if t_grid.is_empty() {
        return Err(domain("t grid is empty"));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(domain(format!("t = {t} must be positive")));
    }
    if x.len() != a.dim() || x.len() != f.generator.dim() {
        return Err(domain("vector, family and generator dimensions differ"));
    }
    let xm = column(x);
    let (alpha, beta) = (f.eta1, f.eta2);
    let points: Vec<ResolventPoint> = t_grid
        .par_iter()
        .map(|&t| match resolvent_residual(f, a, alpha, beta, t, &xm, cfg) {
            Ok((residual, norm)) => ResolventPoint { t, residual, norm, error: None },
            Err(e) => ResolventPoint { t, residual: f64::NAN, norm: f64::NAN, error: Some(e.to_string()) },
        })
        .collect();
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, |m: f64, r| if r.is_nan() { f64::NAN } else { m.max(r) });
    let tolerance = if a.is_matrix() { MATRIX_RESOLVENT_TOL } else { GRID_RESOLVENT_TOL };
    Ok(ResolventReport {
        family: f.describe(),
        eta1: alpha,
        eta2: beta,
        pass: max_residual <= tolerance,
        points,
        max_residual,
        tolerance,
    })
}

fn resolvent_residual(
    f: &OperatorFamily,
    a: &Generator,
    alpha: f64,
    beta: f64,
    t: f64,
    x: &DMatrix<Complex64>,
    cfg: &QuadConfig,
) -> Result<(f64, f64)> {
    let sx = f.apply(t, x, cfg)?;
    let kernel = Integrand::new(move |s: f64| g_kernel(alpha, s).unwrap_or(f64::NAN)).origin(alpha - 1.0);
    let slot = ErrorSlot::default();
    let fam = Integrand::new(|s: f64| match f.apply(s, x, cfg) {
        Ok(v) => v,
        Err(e) => slot.fail(e, x),
    })
    .origin(beta - 1.0);
    let conv = slot.finish(convolve_finite(&kernel, &fam, t, cfg).map(|r| r.value))?;
    let rhs = x * Complex64::new(g_kernel(beta, t)?, 0.0) + a.apply(&conv)?;
    let norm = l2(&sx);
    Ok((l2(&(&sx - rhs)) / norm.max(f64::MIN_POSITIVE), norm))
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionResidual {
    pub t: f64,
    pub a: Complex64,
    /// ‖(a - A) B_a(t) - (m^a_{α,β}(t) - S(t))‖, relative.
    pub incl1: f64,
    /// ‖B_a(t) (a - A) - (m^a_{α,β}(t) - S(t))‖, relative.
    pub incl2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
    pub method: String,
    pub expected: Vec<Complex64>,
    pub computed: Vec<Complex64>,
    pub max_mismatch: f64,
    pub tolerance: f64,
    pub inclusion: Vec<InclusionResidual>,
    pub max_inclusion_residual: f64,
    pub inclusion_tolerance: f64,
    pub pass: bool,
}

pub const SPECTRAL_TOL: f64 = 1e-7;
pub const INCLUSION_TOL: f64 = 1e-5;

/// The (g_α, g_β)-regularized family of a matrix generator: subordination of
/// the exponential when 0 < α < 1 and β ≥ α, spectral calculus otherwise.
pub fn matrix_family(a: Arc<Generator>, alpha: f64, beta: f64) -> Result<OperatorFamily> {
    if alpha > 0.0 && alpha < 1.0 && beta >= alpha {
        base_family(a).subordinated(alpha, beta - alpha)
    } else {
        OperatorFamily::functional_calculus(a, alpha, beta)
    }
}

/// Compares the eigenvalues of S_{α,β}(t) with {m^{λ_i}_{α,β}(t)} and checks
/// the two scalar inclusion identities for a = λ_i at t/2 and t.
pub fn spectral_inclusion_check(a: Arc<Generator>, alpha: f64, beta: f64, t: f64, cfg: &QuadConfig) -> Result<SpectralReport> {
    if !a.is_matrix() {
        return Err(domain("spectral inclusion is checked for matrix generators"));
    }
    let lambdas = a.eigenvalues()?;
    let fam = matrix_family(a.clone(), alpha, beta)?;
    let method = match fam.kind {
        FamilyKind::Subordinated { .. } => "subordination",
        _ => "functional_calculus",
    };
    let n = a.dim();
    let eye = DMatrix::<Complex64>::identity(n, n);
    let s = fam.apply(t, &eye, cfg)?;
    let computed = eigenvalues(&s)?;
    let expected: Vec<Complex64> = lambdas
        .iter()
        .map(|&l| Ok(ml_kernel_with(MLKernelParams::new(alpha, beta, l)?, t, cfg)?.value))
        .collect::<Result<_>>()?;
    let max_mismatch = multiset_distance(&expected, &computed);

    let tasks: Vec<(f64, Complex64)> = [0.5 * t, t].iter().flat_map(|&tt| lambdas.iter().map(move |&l| (tt, l))).collect();
    let inclusion: Vec<InclusionResidual> = tasks
        .par_iter()
        .map(|&(tt, l)| inclusion_residual(&fam, &a, alpha, beta, tt, l, cfg))
        .collect::<Result<_>>()?;
    let max_inclusion_residual = inclusion.iter().map(|r| r.incl1.max(r.incl2)).fold(0.0, f64::max);
    Ok(SpectralReport {
        alpha,
        beta,
        t,
        method: method.into(),
        pass: max_mismatch <= SPECTRAL_TOL && max_inclusion_residual <= INCLUSION_TOL,
        expected,
        computed,
        max_mismatch,
        tolerance: SPECTRAL_TOL,
        inclusion,
        max_inclusion_residual,
        inclusion_tolerance: INCLUSION_TOL,
    })
}

fn inclusion_residual(
    fam: &OperatorFamily,
    a: &Generator,
    alpha: f64,
    beta: f64,
    t: f64,
    l: Complex64,
    cfg: &QuadConfig,
) -> Result<InclusionResidual> {
    let n = a.dim();
    let eye = DMatrix::<Complex64>::identity(n, n);
    let kp = MLKernelParams::new(alpha, alpha, l)?;
    let slot = ErrorSlot::default();
    let b = integrate_endpoints(
        |left: f64, right: f64| {
            let m = match ml_kernel_with(kp, right, cfg) {
                Ok(m) => m.value,
                Err(e) => return slot.fail(e, &eye),
            };
            match fam.apply(left, &eye, cfg) {
                Ok(s) => s * m,
                Err(e) => slot.fail(e, &eye),
            }
        },
        t,
        beta - 1.0,
        alpha - 1.0,
        cfg,
    );
    let b = slot.finish(b.map(|r| r.value))?;
    let s = fam.apply(t, &eye, cfg)?;
    let m = ml_kernel_with(MLKernelParams::new(alpha, beta, l)?, t, cfg)?.value;
    let rhs = &eye * m - &s;
    let shifted = &eye * l - a.apply(&eye)?;
    let scale = m.norm() * (n as f64).sqrt() + l2(&s);
    Ok(InclusionResidual {
        t,
        a: l,
        incl1: l2(&(&shifted * &b - &rhs)) / scale,
        incl2: l2(&(&b * &shifted - &rhs)) / scale,
    })
}

fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    Ok(Schur::try_new(m.clone(), f64::EPSILON, 100_000)
        .and_then(|s| s.eigenvalues())
        .ok_or_else(|| numerical("Schur iteration did not converge"))?
        .iter()
        .copied()
        .collect())
}

/// Smallest maximal pairwise distance over matchings of two multisets,
/// measured relative to max(1, |expected|).
pub fn multiset_distance(expected: &[Complex64], computed: &[Complex64]) -> f64 {
    if expected.len() != computed.len() {
        return f64::INFINITY;
    }
    let d = |i: usize, j: usize| (expected[i] - computed[j]).norm() / expected[i].norm().max(1.0);
    let n = expected.len();
    if n > 8 {
        let mut used = vec![false; n];
        let mut worst = 0.0f64;
        for i in 0..n {
            let j = (0..n)
                .filter(|&j| !used[j])
                .min_by(|&a, &b| d(i, a).total_cmp(&d(i, b)))
                .expect("unused element");
            used[j] = true;
            worst = worst.max(d(i, j));
        }
        return worst;
    }
    fn best(i: usize, used: &mut Vec<bool>, d: &dyn Fn(usize, usize) -> f64) -> f64 {
        if i == used.len() {
            return 0.0;
        }
        let mut out = f64::INFINITY;
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                out = out.min(d(i, j).max(best(i + 1, used, d)));
                used[j] = false;
            }
        }
        out
    }
    best(0, &mut vec![false; n], &d)
}

#[derive(Debug, Clone, Serialize)]
pub struct LaplacePoint {
    pub lambda: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LaplaceReport {
    pub family: String,
    pub points: Vec<LaplacePoint>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub const LAPLACE_TOL: f64 = 1e-5;

/// ∫_0^∞ e^{-λt} S(t)x dt against λ^{η₁-η₂}(λ^{η₁} - A)^{-1}x at λ = ω + 1, ω + 2
/// (ω the growth bound of the family) unless λ values are given.
pub fn laplace_characterization(
    f: &OperatorFamily,
    x: &DVector<Complex64>,
    lambdas: &[f64],
    cfg: &QuadConfig,
) -> Result<LaplaceReport> {
    let w = f.growth_bound();
    let lambdas: Vec<f64> = if lambdas.is_empty() { vec![w + 1.0, w + 2.0] } else { lambdas.to_vec() };
    let xm = column(x);
    let points: Vec<LaplacePoint> = lambdas
        .par_iter()
        .map(|&lam| {
            let slot = ErrorSlot::default();
            let it = Integrand::new(|t: f64| match f.apply(t, &xm, cfg) {
                Ok(v) => v,
                Err(e) => slot.fail(e, &xm),
            })
            .origin(f.eta2 - 1.0)
            .growth(w);
            let got = slot.finish(laplace_numeric(&it, Complex64::new(lam, 0.0), cfg).map(|r| r.value))?;
            let want = resolvent_value(&f.generator, f.eta1, f.eta2, lam, &xm)?;
            Ok(LaplacePoint { lambda: lam, residual: l2(&(&got - &want)) / l2(&want).max(f64::MIN_POSITIVE) })
        })
        .collect::<Result<_>>()?;
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(LaplaceReport { family: f.describe(), points, max_residual, tolerance: LAPLACE_TOL, pass: max_residual <= LAPLACE_TOL })
}

/// λ^{η₁-η₂}(λ^{η₁} - A)^{-1} x, by LU for matrices and spectrally otherwise.
pub fn resolvent_value(a: &Generator, eta1: f64, eta2: f64, lam: f64, x: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let mu = Complex64::new(lam.powf(eta1), 0.0);
    let scale = Complex64::new(lam.powf(eta1 - eta2), 0.0);
    match &a.kind {
        super::GeneratorKind::Matrix(m) => {
            let n = m.nrows();
            let shifted = DMatrix::<Complex64>::identity(n, n) * mu - m;
            let y = shifted.lu().solve(x).ok_or_else(|| domain(format!("λ = {lam} lies in the spectrum")))?;
            Ok(y * scale)
        }
        _ => a.spectral_apply(x, |l| {
            if (mu - l).norm() == 0.0 {
                Err(domain(format!("λ = {lam} lies in the spectrum")))
            } else {
                Ok(scale / (mu - l))
            }
        }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizationReport {
    pub t: Vec<f64>,
    pub deviation: Vec<f64>,
    pub pass: bool,
}

/// ‖S(t)x/g_{η₂}(t) - x‖/‖x‖ on t = 2^{-k}, k = 1..=k_max; passes when the
/// sequence does not increase and ends below its start.
pub fn normalization_limit(f: &OperatorFamily, x: &DVector<Complex64>, k_max: u32, cfg: &QuadConfig) -> Result<NormalizationReport> {
    let xm = column(x);
    let nx = l2(&xm);
    let t: Vec<f64> = (1..=k_max).map(|k| 0.5f64.powi(k as i32)).collect();
    let deviation: Vec<f64> = t
        .par_iter()
        .map(|&t| {
            let s = f.apply(t, &xm, cfg)?;
            let g = g_kernel(f.eta2, t)?;
            Ok(l2(&(s / Complex64::new(g, 0.0) - &xm)) / nx)
        })
        .collect::<Result<_>>()?;
    let monotone = deviation.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-6) + 1e-12);
    let pass = monotone && deviation.last() < deviation.first();
    Ok(NormalizationReport { t, deviation, pass })
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutationReport {
    pub t: f64,
    pub residual: f64,
    pub bound: f64,
    pub pass: bool,
}

/// ‖A S(t)x - S(t)Ax‖ against 1e-10 ‖A‖ ‖x‖ for matrix generators.
pub fn commutation_check(f: &OperatorFamily, t: f64, x: &DVector<Complex64>, cfg: &QuadConfig) -> Result<CommutationReport> {
    let super::GeneratorKind::Matrix(m) = &f.generator.kind else {
        return Err(domain("commutation is checked for matrix generators"));
    };
    let n = m.nrows();
    let s = f.apply(t, &DMatrix::identity(n, n), cfg)?;
    let xm = column(x);
    let residual = l2(&((m * &s - &s * m) * xm));
    let op_norm = m.clone().svd(false, false).singular_values.max();
    let bound = 1e-10 * op_norm * x.norm();
    Ok(CommutationReport { t, residual, bound, pass: residual <= bound })
}
