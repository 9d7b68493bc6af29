use crate::config::Params;
use crate::error::{io_error, CliError};
use fracsub::frac_cauchy::{
    caputo_residual, fracpower_residual, rl_closed_form, rl_residual, solve_caputo, solve_rl, solve_rl_fracpower,
    CauchyProblem, OdeResidual, TimeGrid, TimeSeries,
};
use fracsub::resolvent::{Generator, Grid, KernelFamily, SymbolTag};
use fracsub::scaled_wright::{ml_kernel_with, MLKernelParams};
use fracsub::QuadConfig;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

/// Residual bound reported with every solution.
pub const RESIDUAL_TOL: f64 = 1e-3;
/// Bound on the deviation from the spectral closed form.
pub const CLOSED_FORM_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Rl,
    RlFracpower,
    Caputo,
}

impl Kind {
    pub fn parse(tag: &str) -> Result<Self, CliError> {
        Ok(match tag {
            "rl" => Kind::Rl,
            "rl-fracpower" => Kind::RlFracpower,
            "caputo" => Kind::Caputo,
            other => {
                return Err(CliError::Config(format!("unknown problem kind '{other}'; expected rl, rl-fracpower or caputo")))
            }
        })
    }

    fn tag(self) -> &'static str {
        match self {
            Kind::Rl => "rl",
            Kind::RlFracpower => "rl-fracpower",
            Kind::Caputo => "caputo",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub kind: String,
    pub generator: String,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub t: Vec<f64>,
    /// ‖D v(t) - A v(t)‖ / ‖v(t)‖ per time.
    pub residual: Vec<f64>,
    pub max_interior_residual: f64,
    pub residual_tolerance: f64,
    /// Largest relative deviation from the spectral closed form.
    pub closed_form_error: f64,
    pub closed_form_tolerance: f64,
    pub residual_pass: bool,
    pub closed_form_pass: bool,
}

fn generator(p: &Params) -> Result<Arc<Generator>, CliError> {
    let chosen: Vec<&str> = ["matrix", "multiplication", "convolution"].into_iter().filter(|k| p.contains(k)).collect();
    if chosen.len() != 1 {
        return Err(CliError::Config(
            "exactly one of the parameters 'matrix', 'multiplication' or 'convolution' must be given".into(),
        ));
    }
    let n = p.usize_or("nx", 16)?;
    let g = match chosen[0] {
        "matrix" => Generator::from_rows(&p.matrix("matrix")?)?,
        "multiplication" => {
            let tag = p.opt_str("multiplication")?.unwrap_or_default();
            let sym = SymbolTag::from_tag(&tag).ok_or_else(|| {
                let all: Vec<&str> = SymbolTag::ALL.iter().map(|s| s.tag()).collect();
                CliError::Config(format!("parameter 'multiplication' must be one of {}", all.join(", ")))
            })?;
            let (lo, hi) = extent(p, (-1.0, 1.0))?;
            let grid = Grid::closed_1d(n, lo, hi)?;
            Generator::from_symbol(grid, sym)?
        }
        _ => {
            let tag = p.opt_str("convolution")?.unwrap_or_default();
            let kernel = KernelFamily::from_tag(&tag)
                .ok_or_else(|| CliError::Config("parameter 'convolution' must be gaussian or poisson".into()))?;
            let (lo, hi) = extent(p, (-std::f64::consts::PI, std::f64::consts::PI))?;
            Generator::convolution(Grid::periodic_1d(n, lo, hi)?, kernel)?
        }
    };
    Ok(Arc::new(g))
}

/// Spatial interval from `grid=[lo..hi]` (or `[lo, hi]`), else `x_min`/`x_max`.
fn extent(p: &Params, default: (f64, f64)) -> Result<(f64, f64), CliError> {
    if !p.contains("grid") {
        return Ok((p.f64_or("x_min", default.0)?, p.f64_or("x_max", default.1)?));
    }
    let bad = || CliError::Config("parameter 'grid' must be an interval [lo..hi] with lo < hi".into());
    let ends = match p.opt_str("grid") {
        Ok(Some(s)) => {
            let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
            let (a, b) = inner.split_once("..").or_else(|| inner.split_once(',')).ok_or_else(bad)?;
            vec![a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?]
        }
        _ => p.list("grid").map_err(|_| bad())?,
    };
    match ends[..] {
        [lo, hi] if lo < hi => Ok((lo, hi)),
        _ => Err(bad()),
    }
}

/// The datum `x`, or ones for matrices and e^{-x²} on grids.
fn datum(p: &Params, g: &Generator) -> Result<DVector<Complex64>, CliError> {
    if p.contains("x") {
        let v = p.list("x")?;
        if v.len() != g.dim() {
            return Err(CliError::Config(format!("parameter 'x' has {} entries, the generator has dimension {}", v.len(), g.dim())));
        }
        return Ok(DVector::from_iterator(v.len(), v.into_iter().map(|x| Complex64::new(x, 0.0))));
    }
    Ok(match g.grid() {
        Some(grid) => grid.sample(|x| Complex64::new((-x[0] * x[0]).exp(), 0.0)),
        None => DVector::from_element(g.dim(), Complex64::new(1.0, 0.0)),
    })
}

/// Spectral t^{β-1} E_{γ,β}(rate(λ) t^γ) x.
fn spectral_closed_form(
    prob: &CauchyProblem,
    grid: TimeGrid,
    gamma: f64,
    beta: f64,
    rate: impl Fn(Complex64) -> Complex64,
    cfg: &QuadConfig,
) -> Result<Vec<DVector<Complex64>>, CliError> {
    let xm = DMatrix::from_column_slice(prob.x.len(), 1, prob.x.as_slice());
    grid.times()
        .iter()
        .map(|&t| {
            let y = prob
                .generator
                .spectral_apply(&xm, |l| Ok(ml_kernel_with(MLKernelParams::new(gamma, beta, rate(l))?, t, cfg)?.value))?;
            Ok(y.column(0).clone_owned())
        })
        .collect()
}

fn max_rel_error(v: &TimeSeries, want: &[DVector<Complex64>]) -> f64 {
    v.values
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).norm() / b.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

pub fn run(kind: &str, p: &Params, cfg: &QuadConfig) -> Result<(TimeSeries, SolveReport), CliError> {
    let kind = Kind::parse(kind)?;
    let g = generator(p)?;
    let x = datum(p, &g)?;
    let alpha = p.f64("alpha")?;
    let prob = CauchyProblem::new(g.clone(), alpha, x)?;
    let grid = TimeGrid::up_to(p.f64_or("t_end", 2.0)?, p.usize_or("n", 40)?)?;
    let gamma = match kind {
        Kind::RlFracpower => Some(p.f64("gamma")?),
        _ => None,
    };
    log::info!("solve {}: {} on {} steps up to t = {}", kind.tag(), g.describe(), grid.n, grid.t(grid.n - 1));
    let (v, res, closed): (TimeSeries, OdeResidual, f64) = match kind {
        Kind::Rl => {
            let v = solve_rl(&prob, grid, cfg)?;
            let r = rl_residual(&v, &g, alpha)?;
            let c = max_rel_error(&v, &rl_closed_form(&prob, grid, cfg)?.values);
            (v, r, c)
        }
        Kind::Caputo => {
            let v = solve_caputo(&prob, grid, cfg)?;
            let r = caputo_residual(&v, &g, alpha)?;
            let c = max_rel_error(&v, &spectral_closed_form(&prob, grid, alpha, 1.0, |l| l, cfg)?);
            (v, r, c)
        }
        Kind::RlFracpower => {
            let gm = gamma.unwrap_or_default();
            let v = solve_rl_fracpower(&prob, gm, grid, cfg)?;
            let r = fracpower_residual(&v, &prob, gm)?;
            let c = max_rel_error(&v, &spectral_closed_form(&prob, grid, gm, gm, |l| -(-l).powf(alpha), cfg)?);
            (v, r, c)
        }
    };
    let report = SolveReport {
        kind: kind.tag().into(),
        generator: g.describe(),
        alpha,
        gamma,
        residual_pass: res.max_interior <= RESIDUAL_TOL,
        closed_form_pass: closed <= CLOSED_FORM_TOL,
        t: res.t,
        residual: res.residual,
        max_interior_residual: res.max_interior,
        residual_tolerance: RESIDUAL_TOL,
        closed_form_error: closed,
        closed_form_tolerance: CLOSED_FORM_TOL,
    };
    if !(report.residual_pass && report.closed_form_pass) {
        log::warn!(
            "solve {}: interior residual {:.3e}, closed-form error {:.3e}",
            kind.tag(),
            report.max_interior_residual,
            report.closed_form_error
        );
    }
    Ok((v, report))
}

pub fn write_report(report: &SolveReport, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, report).map_err(|e| io_error("writing report", e))?;
    writeln!(out).map_err(|e| io_error("writing report", e))
}
