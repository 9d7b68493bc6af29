use super::{ml_real, psi_tail, psi_value, PsiParams};
use crate::error::{domain, Result};
use crate::quadrature::{
    convolve_finite, graded_rule, integrate_endpoints, integrate_semi_infinite, GradedRule, Integrand, QuadConfig,
};
use crate::special_fn::{g_unchecked, gamma, EvalResult};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// The identities among scaled Wright and Mittag-Leffler functions that the
/// verifier can check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// ∫ e^{-λt} ψ_{α,β}(t,s) dt = λ^{-β} e^{-λ^α s}; points (s, λ).
    LaplaceT,
    /// ∫ e^{λs} ψ_{α,β}(t,s) ds = m^λ_{α,α+β}(t) for λ ≤ 0; points (t, λ).
    LaplaceS,
    /// ∫∫ e^{-λs-μt} ψ_{α,β}(t,s) ds dt = 1/(μ^β(μ^α+λ)); points (λ, μ).
    DoubleLaplace,
    /// ψ_{α,β+η}(t,s) = (g_η ∗ ψ_{α,β}(·,s))(t); points (t, s).
    ConvShift,
    /// ∫ g_η(s) ψ_{α,β}(t,s) ds = g_{αη+β}(t); points (t).
    Moment,
    /// ψ_{α,β+αη}(t,u) = ∫_u^∞ g_η(s-u) ψ_{α,β}(t,s) ds; points (t, u).
    RlShift,
    /// ψ_{αγ,β-α+α(δ-γ)}(t,s) = ∫ ψ_{α,β-α}(t,r) ψ_{γ,δ-γ}(r,s) dr; points (t, s).
    Subordination,
    /// Two-time identity for m^ω_{α,β} with β > α; points (t, s).
    AlgebraicBeta,
    /// m^ω_{α,α}(t+s) as a double integral with kernel (t+s-r₁-r₂)^{-1-α}; points (t, s).
    AlgebraicAlpha,
    /// The same two-time identities for u-convolutions of ψ; points (t, s, u).
    /// β = α checks the ψ_{α,0} form, β > α the ψ_{α,β-α} form.
    PengLiPsi,
}

impl Identity {
    pub const ALL: [Identity; 10] = [
        Identity::LaplaceT,
        Identity::LaplaceS,
        Identity::DoubleLaplace,
        Identity::ConvShift,
        Identity::Moment,
        Identity::RlShift,
        Identity::Subordination,
        Identity::AlgebraicBeta,
        Identity::AlgebraicAlpha,
        Identity::PengLiPsi,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Identity::LaplaceT => "laplace_t",
            Identity::LaplaceS => "laplace_s",
            Identity::DoubleLaplace => "double_laplace",
            Identity::ConvShift => "conv_shift",
            Identity::Moment => "moment",
            Identity::RlShift => "rl_shift",
            Identity::Subordination => "subordination",
            Identity::AlgebraicBeta => "algebraic_beta",
            Identity::AlgebraicAlpha => "algebraic_alpha",
            Identity::PengLiPsi => "peng_li_psi",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.tag() == tag)
    }

    /// Pass threshold on the identity's residual.
    pub fn tolerance(self) -> f64 {
        match self {
            Identity::Moment => 1e-7,
            Identity::AlgebraicBeta | Identity::AlgebraicAlpha | Identity::PengLiPsi => 1e-4,
            _ => 1e-6,
        }
    }

    /// Whether the residual is relative (singular double integrals) or absolute.
    pub fn relative(self) -> bool {
        matches!(self, Identity::AlgebraicBeta | Identity::AlgebraicAlpha | Identity::PengLiPsi)
    }

    fn point_len(self) -> usize {
        match self {
            Identity::Moment => 1,
            Identity::PengLiPsi => 3,
            _ => 2,
        }
    }

    fn param_names(self) -> &'static [&'static str] {
        match self {
            Identity::LaplaceT | Identity::LaplaceS | Identity::DoubleLaplace => &["alpha", "beta"],
            Identity::ConvShift | Identity::Moment | Identity::RlShift => &["alpha", "beta", "eta"],
            Identity::Subordination => &["alpha", "beta", "gamma", "delta"],
            Identity::AlgebraicBeta | Identity::AlgebraicAlpha => &["alpha", "beta", "omega"],
            Identity::PengLiPsi => &["alpha", "beta"],
        }
    }
}

impl std::fmt::Display for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Parameters of an identity check; each identity reads only the fields it needs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IdentityParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub eta: f64,
    pub omega: f64,
}

impl IdentityParams {
    fn get(&self, name: &str) -> f64 {
        match name {
            "alpha" => self.alpha,
            "beta" => self.beta,
            "gamma" => self.gamma,
            "delta" => self.delta,
            "eta" => self.eta,
            _ => self.omega,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResidual {
    pub point: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Residual of the singular double-integral identities at one mesh level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStep {
    pub levels: usize,
    pub nodes_per_axis: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: Identity,
    pub params: BTreeMap<String, f64>,
    pub points: Vec<PointResidual>,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    /// The residual compared with `tolerance`: relative for singular double
    /// integrals, absolute otherwise.
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub refinement: Vec<RefinementStep>,
}

impl IdentityReport {
    pub fn failures(&self) -> impl Iterator<Item = &PointResidual> {
        self.points.iter().filter(|p| p.error.is_some())
    }
}

/// Mesh levels of the singular double-integral refinement study; the last is
/// the one reported per point.
pub const REFINEMENT_LEVELS: [usize; 3] = [10, 20, 40];
const GRADE_RATIO: f64 = 0.3;
const GRADE_ORDER: usize = 10;

/// Checks one identity at every grid point. Quadrature failures are recorded
/// per point and make the report fail without aborting the sweep.
pub fn verify_psi_identity(
    which: Identity,
    params: &IdentityParams,
    grid: &[Vec<f64>],
    cfg: &QuadConfig,
) -> Result<IdentityReport> {
    check_params(which, params)?;
    for p in grid {
        if p.len() != which.point_len() {
            return Err(domain(format!(
                "{which} expects points with {} coordinates, got {}",
                which.point_len(),
                p.len()
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(domain(format!("{which}: non-finite grid point {p:?}")));
        }
    }
    let names = which.param_names();
    let params_map = names.iter().map(|n| (n.to_string(), params.get(n))).collect();
    let mut refinement = Vec::new();
    let points: Vec<PointResidual> = if which.relative() {
        let mut by_level: Vec<Vec<PointResidual>> = Vec::new();
        for &levels in &REFINEMENT_LEVELS {
            let rows: Vec<PointResidual> = grid
                .par_iter()
                .map(|p| residual(p, check_singular(which, params, p, levels, cfg)))
                .collect();
            let worst = worst_residual(&rows, true);
            refinement.push(RefinementStep {
                levels,
                nodes_per_axis: 2 * (levels + 1) * GRADE_ORDER,
                residual: worst,
            });
            by_level.push(rows);
        }
        by_level.pop().unwrap_or_default()
    } else {
        grid.par_iter()
            .map(|p| residual(p, check_smooth(which, params, p, cfg)))
            .collect()
    };
    let max_abs = worst_residual(&points, false);
    let max_rel = worst_residual(&points, true);
    let residual = if which.relative() { max_rel } else { max_abs };
    let tolerance = which.tolerance();
    let ok_points = points.iter().all(|p| p.error.is_none());
    Ok(IdentityReport {
        identity: which,
        params: params_map,
        points,
        max_abs_residual: max_abs,
        max_rel_residual: max_rel,
        residual,
        tolerance,
        pass: ok_points && residual <= tolerance,
        refinement,
    })
}

fn worst_residual(rows: &[PointResidual], relative: bool) -> f64 {
    rows.iter()
        .map(|r| {
            if r.error.is_some() {
                f64::INFINITY
            } else if relative {
                r.rel_residual
            } else {
                r.abs_residual
            }
        })
        .fold(0.0, f64::max)
}

fn residual(point: &[f64], sides: Result<(f64, f64)>) -> PointResidual {
    match sides {
        Ok((lhs, rhs)) if lhs.is_finite() && rhs.is_finite() => {
            let abs = (lhs - rhs).abs();
            PointResidual {
                point: point.to_vec(),
                lhs,
                rhs,
                abs_residual: abs,
                rel_residual: if rhs != 0.0 { abs / rhs.abs() } else { abs },
                error: None,
            }
        }
        Ok((lhs, rhs)) => PointResidual {
            point: point.to_vec(),
            lhs,
            rhs,
            abs_residual: f64::INFINITY,
            rel_residual: f64::INFINITY,
            error: Some("non-finite side".into()),
        },
        Err(e) => PointResidual {
            point: point.to_vec(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_residual: f64::INFINITY,
            rel_residual: f64::INFINITY,
            error: Some(e.to_string()),
        },
    }
}

fn check_params(which: Identity, p: &IdentityParams) -> Result<()> {
    let open01 = |name: &str, v: f64| {
        if v > 0.0 && v < 1.0 {
            Ok(())
        } else {
            Err(domain(format!("{which}: {name} = {v} must lie in (0,1)")))
        }
    };
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(domain(format!("{which}: {name} = {v} must be positive")))
        }
    };
    open01("alpha", p.alpha)?;
    match which {
        Identity::LaplaceT | Identity::LaplaceS | Identity::DoubleLaplace => {
            PsiParams::new(p.alpha, p.beta)?;
        }
        Identity::ConvShift | Identity::Moment | Identity::RlShift => {
            PsiParams::new(p.alpha, p.beta)?;
            positive("eta", p.eta)?;
        }
        Identity::Subordination => {
            open01("gamma", p.gamma)?;
            if !(p.beta >= p.alpha && p.beta.is_finite()) {
                return Err(domain(format!("{which}: beta = {} must be at least alpha", p.beta)));
            }
            if !(p.delta >= p.gamma && p.delta.is_finite()) {
                return Err(domain(format!("{which}: delta = {} must be at least gamma", p.delta)));
            }
        }
        Identity::AlgebraicBeta => {
            if !(p.beta > p.alpha && p.beta.is_finite()) {
                return Err(domain(format!("{which}: beta = {} must exceed alpha", p.beta)));
            }
            if !p.omega.is_finite() {
                return Err(domain(format!("{which}: omega must be finite")));
            }
        }
        Identity::AlgebraicAlpha => {
            if !p.omega.is_finite() {
                return Err(domain(format!("{which}: omega must be finite")));
            }
        }
        Identity::PengLiPsi => {
            if !(p.beta >= p.alpha && p.beta.is_finite()) {
                return Err(domain(format!("{which}: beta = {} must be at least alpha", p.beta)));
            }
        }
    }
    Ok(())
}

fn positive_coords(which: Identity, names: &[&str], vals: &[f64]) -> Result<()> {
    for (n, v) in names.iter().zip(vals) {
        if !(*v > 0.0) {
            return Err(domain(format!("{which}: {n} = {v} must be positive")));
        }
    }
    Ok(())
}

fn check_smooth(which: Identity, p: &IdentityParams, pt: &[f64], cfg: &QuadConfig) -> Result<(f64, f64)> {
    let (a, b) = (p.alpha, p.beta);
    let pp = PsiParams { alpha: a, beta: b };
    match which {
        Identity::LaplaceT => {
            let (s, lam) = (pt[0], pt[1]);
            positive_coords(which, &["s", "lambda"], &[s, lam])?;
            let it = Integrand::new(move |t: f64| psi_value(pp, t, s, cfg) * (-lam * t).exp())
                .decay(lam, 1.0)
                .breakpoints(vec![0.25 * s.powf(1.0 / a), s.powf(1.0 / a), 4.0 * s.powf(1.0 / a)]);
            let lhs = integrate_semi_infinite(&it, cfg)?.value;
            Ok((lhs, lam.powf(-b) * (-lam.powf(a) * s).exp()))
        }
        Identity::LaplaceS => {
            let (t, lam) = (pt[0], pt[1]);
            positive_coords(which, &["t"], &[t])?;
            if lam > 0.0 {
                return Err(domain(format!("{which}: lambda = {lam} must be nonpositive")));
            }
            let lhs = laplace_in_s(pp, t, -lam, cfg)?.value;
            Ok((lhs, ml_real(a, a + b, lam, t, cfg)?))
        }
        Identity::DoubleLaplace => {
            let (lam, mu) = (pt[0], pt[1]);
            positive_coords(which, &["lambda", "mu"], &[lam, mu])?;
            // nested quadrature: the inner tolerance only has to beat the identity's
            let icfg = cfg.with_tol(cfg.rel_tol.max(1e-9), cfg.abs_tol.max(1e-11));
            let icfg = &icfg;
            let inner = move |t: f64| {
                laplace_in_s(pp, t, lam, icfg).map(|r| r.value).unwrap_or(f64::NAN) * (-mu * t).exp()
            };
            let it = Integrand::new(inner).origin((a + b - 1.0).min(0.0)).decay(mu, 1.0);
            let lhs = integrate_semi_infinite(&it, icfg)?.value;
            Ok((lhs, 1.0 / (mu.powf(b) * (mu.powf(a) + lam))))
        }
        Identity::ConvShift => {
            let (t, s) = (pt[0], pt[1]);
            positive_coords(which, &["t"], &[t])?;
            if !(s >= 0.0) {
                return Err(domain(format!("{which}: s = {s} must be nonnegative")));
            }
            let eta = p.eta;
            let lhs = psi_value(PsiParams { alpha: a, beta: b + eta }, t, s, cfg);
            let g = Integrand::new(move |r: f64| g_unchecked(eta, r)).origin(eta - 1.0);
            let origin = if s > 0.0 { 0.0 } else { (b - 1.0).min(0.0) };
            if s == 0.0 && b == 0.0 {
                return Err(domain(format!("{which}: s = 0 needs beta > 0")));
            }
            let f = Integrand::new(move |r: f64| psi_value(pp, r, s, cfg)).origin(origin);
            let rhs = convolve_finite(&g, &f, t, cfg)?.value;
            Ok((lhs, rhs))
        }
        Identity::Moment => {
            let t = pt[0];
            positive_coords(which, &["t"], &[t])?;
            let eta = p.eta;
            let (rate, power) = psi_tail(a, t);
            let it = Integrand::new(move |s: f64| g_unchecked(eta, s) * psi_value(pp, t, s, cfg))
                .origin((eta - 1.0).min(0.0))
                .decay(rate, power)
                .breakpoints(vec![t.powf(a)]);
            let lhs = integrate_semi_infinite(&it, cfg)?.value;
            Ok((lhs, g_unchecked(a * eta + b, t)))
        }
        Identity::RlShift => {
            let (t, u) = (pt[0], pt[1]);
            positive_coords(which, &["t"], &[t])?;
            if !(u >= 0.0) {
                return Err(domain(format!("{which}: u = {u} must be nonnegative")));
            }
            let eta = p.eta;
            let lhs = psi_value(PsiParams { alpha: a, beta: b + a * eta }, t, u, cfg);
            let (rate, power) = psi_tail(a, t);
            let it = Integrand::new(move |v: f64| g_unchecked(eta, v) * psi_value(pp, t, u + v, cfg))
                .origin((eta - 1.0).min(0.0))
                .decay(rate, power)
                .breakpoints(vec![t.powf(a)]);
            let rhs = integrate_semi_infinite(&it, cfg)?.value;
            Ok((lhs, rhs))
        }
        Identity::Subordination => {
            let (t, s) = (pt[0], pt[1]);
            positive_coords(which, &["t", "s"], &[t, s])?;
            let (g, d) = (p.gamma, p.delta);
            let outer = PsiParams { alpha: a, beta: b - a };
            let inner = PsiParams { alpha: g, beta: d - g };
            let lhs = psi_value(PsiParams { alpha: a * g, beta: b - a + a * (d - g) }, t, s, cfg);
            let (rate, power) = psi_tail(a, t);
            let it = Integrand::new(move |r: f64| {
                let x = psi_value(outer, t, r, cfg);
                if x == 0.0 {
                    0.0
                } else {
                    x * psi_value(inner, r, s, cfg)
                }
            })
            .decay(rate, power)
            .breakpoints(vec![t.powf(a), s.powf(1.0 / g)]);
            let rhs = integrate_semi_infinite(&it, cfg)?.value;
            Ok((lhs, rhs))
        }
        _ => unreachable!("singular identities are handled by check_singular"),
    }
}

/// ∫_0^∞ e^{-λs} ψ(t,s) ds for λ ≥ 0.
fn laplace_in_s(p: PsiParams, t: f64, lam: f64, cfg: &QuadConfig) -> Result<EvalResult<f64>> {
    let (rate, power) = psi_tail(p.alpha, t);
    let it = Integrand::new(move |s: f64| psi_value(p, t, s, cfg) * (-lam * s).exp())
        .decay(rate, power)
        .breakpoints(vec![t.powf(p.alpha)]);
    integrate_semi_infinite(&it, cfg)
}

fn check_singular(
    which: Identity,
    p: &IdentityParams,
    pt: &[f64],
    levels: usize,
    cfg: &QuadConfig,
) -> Result<(f64, f64)> {
    let (a, b) = (p.alpha, p.beta);
    let (t, s) = (pt[0], pt[1]);
    positive_coords(which, &["t", "s"], &[t, s])?;
    let c = a * gamma(1.0 - a).recip();
    let r1 = graded_rule(0.0, t, true, true, levels, GRADE_RATIO, GRADE_ORDER);
    let r2 = graded_rule(0.0, s, true, true, levels, GRADE_RATIO, GRADE_ORDER);
    match which {
        Identity::AlgebraicBeta | Identity::AlgebraicAlpha => {
            let beta = if which == Identity::AlgebraicAlpha { a } else { b };
            let w = p.omega;
            let m = |r: f64| ml_real(a, beta, w, r, cfg);
            let f1 = weighted(&r1, m)?;
            let f2 = weighted(&r2, m)?;
            let rhs = c * kernel_sum(&r1, &r2, a, &f1, &f2);
            let lhs = if which == Identity::AlgebraicAlpha {
                m(t + s)?
            } else {
                let k = beta - a;
                integrate_endpoints(
                    |l: f64, r: f64| {
                        let left = ml_real(a, beta, w, t + l, cfg).unwrap_or(f64::NAN);
                        let right = ml_real(a, beta, w, l, cfg).unwrap_or(f64::NAN);
                        g_unchecked(k, r) * left - g_unchecked(k, t + r) * right
                    },
                    s,
                    beta - 1.0,
                    k - 1.0,
                    cfg,
                )?
                .value
            };
            Ok((lhs, rhs))
        }
        Identity::PengLiPsi => {
            let u = pt[2];
            positive_coords(which, &["u"], &[u])?;
            let k = b - a;
            let pp = PsiParams { alpha: a, beta: k };
            let rv = graded_rule(0.0, u, true, true, levels, GRADE_RATIO, GRADE_ORDER);
            // C_ij = ∫_0^u ψ(r1_i, u - v) ψ(r2_j, v) dv
            let rv = &rv;
            let table = |rule: &GradedRule, flip: bool| {
                let rows: Vec<f64> = rule
                    .nodes
                    .par_iter()
                    .flat_map_iter(|&r| {
                        (0..rv.len()).map(move |m| {
                            let v = if flip { rv.from_right[m] } else { rv.from_left[m] };
                            rv.weights[m].sqrt() * psi_value(pp, r, v, cfg)
                        })
                    })
                    .collect();
                DMatrix::from_row_slice(rule.len(), rv.len(), &rows)
            };
            let p1 = table(&r1, true);
            let p2 = table(&r2, false);
            if p1.iter().chain(p2.iter()).any(|v| !v.is_finite()) {
                return Err(crate::error::numerical("ψ table has non-finite entries"));
            }
            let conv = &p1 * p2.transpose();
            let mut rhs = 0.0;
            for i in 0..r1.len() {
                for j in 0..r2.len() {
                    let d = r1.from_right[i] + r2.from_right[j];
                    rhs += r1.weights[i] * r2.weights[j] * conv[(i, j)] * d.powf(-1.0 - a);
                }
            }
            rhs *= c;
            let lhs = if k == 0.0 {
                psi_value(pp, t + s, u, cfg)
            } else {
                integrate_endpoints(
                    |l: f64, r: f64| {
                        g_unchecked(k, r) * psi_value(pp, t + l, u, cfg) - g_unchecked(k, t + r) * psi_value(pp, l, u, cfg)
                    },
                    s,
                    0.0,
                    k - 1.0,
                    cfg,
                )?
                .value
            };
            Ok((lhs, rhs))
        }
        _ => unreachable!("smooth identities are handled by check_smooth"),
    }
}

fn weighted(rule: &GradedRule, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    rule.nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(&x, &w)| Ok(w * f(x)?))
        .collect()
}

/// Σ_ij f1_i f2_j ((t - r1_i) + (s - r2_j))^{-1-α}.
fn kernel_sum(r1: &GradedRule, r2: &GradedRule, alpha: f64, f1: &[f64], f2: &[f64]) -> f64 {
    (0..r1.len())
        .into_par_iter()
        .map(|i| {
            let a = r1.from_right[i];
            let row: f64 = (0..r2.len()).map(|j| f2[j] * (a + r2.from_right[j]).powf(-1.0 - alpha)).sum();
            f1[i] * row
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, beta: f64) -> IdentityParams {
        IdentityParams { alpha, beta, ..Default::default() }
    }

    #[test]
    fn tags_round_trip() {
        for i in Identity::ALL {
            assert_eq!(Identity::from_tag(i.tag()), Some(i));
            assert_eq!(serde_json::to_string(&i).unwrap(), format!("\"{}\"", i.tag()));
        }
    }

    #[test]
    fn laplace_in_t_half_order() {
        let cfg = QuadConfig::default();
        let r = verify_psi_identity(Identity::LaplaceT, &params(0.5, 0.5), &[vec![1.0, 2.0]], &cfg).unwrap();
        assert!(r.pass, "{r:?}");
        let exact = 2f64.powf(-0.5) * (-(2f64.sqrt())).exp();
        assert!((r.points[0].lhs - exact).abs() < 1e-9);
    }

    #[test]
    fn conv_shift_unit_order() {
        let cfg = QuadConfig::default();
        let p = IdentityParams { alpha: 0.6, beta: 0.3, eta: 1.0, ..Default::default() };
        let r = verify_psi_identity(Identity::ConvShift, &p, &[vec![1.3, 0.8]], &cfg).unwrap();
        assert!(r.residual <= 1e-7, "{r:?}");
    }

    #[test]
    fn rl_shift_at_zero_is_moment() {
        let cfg = QuadConfig::default();
        let p = IdentityParams { alpha: 0.4, beta: 0.7, eta: 0.8, ..Default::default() };
        let r = verify_psi_identity(Identity::RlShift, &p, &[vec![1.1, 0.0]], &cfg).unwrap();
        let exact = g_unchecked(0.4 * 0.8 + 0.7, 1.1);
        assert!((r.points[0].rhs - exact).abs() < 1e-10, "{r:?}");
        assert!((r.points[0].lhs - exact).abs() < 1e-12);
    }

    #[test]
    fn remark_explicit_integral() {
        let cfg = QuadConfig::default();
        let p = IdentityParams { alpha: 0.5, beta: 1.0, gamma: 0.5, delta: 1.0, ..Default::default() };
        let r = verify_psi_identity(Identity::Subordination, &p, &[vec![1.0, 1.0]], &cfg).unwrap();
        assert!(r.pass && r.residual <= 1e-6, "{r:?}");
    }

    #[test]
    fn algebraic_alpha_refines() {
        let cfg = QuadConfig::default();
        let p = IdentityParams { alpha: 0.5, omega: -1.0, ..Default::default() };
        let r = verify_psi_identity(Identity::AlgebraicAlpha, &p, &[vec![1.0, 0.7]], &cfg).unwrap();
        assert!((r.points[0].lhs - 0.075_831_889_490_824_09).abs() < 1e-14);
        assert!(r.pass, "{r:?}");
        assert!(r.refinement[2].residual < r.refinement[0].residual);
    }

    #[test]
    fn bad_points_are_rejected() {
        let cfg = QuadConfig::default();
        let mut p = params(0.5, 0.5);
        p.eta = 1.0;
        assert!(verify_psi_identity(Identity::Moment, &p, &[vec![1.0, 2.0]], &cfg).is_err());
        assert!(verify_psi_identity(Identity::Moment, &p, &[vec![1.0]], &cfg).unwrap().pass);
        p.alpha = 1.5;
        assert!(verify_psi_identity(Identity::Moment, &p, &[vec![1.0]], &cfg).is_err());
    }
}
