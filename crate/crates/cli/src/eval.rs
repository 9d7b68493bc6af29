use crate::config::Params;
use crate::error::{io_error, CliError};
use fracsub::frac_cauchy::fmt17;
use fracsub::scaled_wright::{levy_density, ml_kernel_with, psi_capital_with, psi_with, MLKernelParams, PsiParams};
use fracsub::special_fn::{mittag_leffler_with, wright_with};
use fracsub::{EvalResult, QuadConfig};
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Ml,
    Wright,
    Psi,
    PsiCapital,
    Levy,
    MlKernel,
}

impl Function {
    pub const TAGS: [&'static str; 6] = ["ml", "wright", "psi", "psi_capital", "levy", "ml_kernel"];

    pub fn parse(tag: &str) -> Result<Self, CliError> {
        Ok(match tag {
            "ml" => Function::Ml,
            "wright" => Function::Wright,
            "psi" => Function::Psi,
            "psi_capital" => Function::PsiCapital,
            "levy" => Function::Levy,
            "ml_kernel" => Function::MlKernel,
            other => {
                return Err(CliError::Config(format!(
                    "unknown function '{other}'; expected one of {}",
                    Self::TAGS.join(", ")
                )))
            }
        })
    }

    /// Input columns in output order; the grid is their Cartesian product.
    fn inputs(self) -> &'static [&'static str] {
        match self {
            Function::Ml => &["alpha", "beta", "z", "z_im"],
            Function::Wright => &["lambda", "mu", "z", "z_im"],
            Function::Psi => &["alpha", "beta", "t", "s"],
            Function::PsiCapital => &["gamma", "alpha", "t", "s"],
            Function::Levy => &["alpha", "s", "t"],
            Function::MlKernel => &["alpha", "beta", "a", "a_im", "t"],
        }
    }

    fn complex(self) -> bool {
        matches!(self, Function::Ml | Function::Wright | Function::MlKernel)
    }
}

fn optional_zero(name: &str) -> bool {
    name.ends_with("_im")
}

fn product(lists: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut rows = vec![Vec::new()];
    for l in lists {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                l.iter().map(move |v| {
                    let mut r = r.clone();
                    r.push(*v);
                    r
                })
            })
            .collect();
    }
    rows
}

fn real(r: EvalResult<f64>) -> EvalResult<Complex64> {
    r.map(|v| Complex64::new(v, 0.0))
}

fn evaluate(f: Function, x: &[f64], cfg: &QuadConfig) -> fracsub::Result<EvalResult<Complex64>> {
    match f {
        Function::Ml => mittag_leffler_with(x[0], x[1], Complex64::new(x[2], x[3]), cfg),
        Function::Wright => wright_with(x[0], x[1], Complex64::new(x[2], x[3]), cfg),
        Function::Psi => psi_with(PsiParams::new(x[0], x[1])?, x[2], x[3], cfg).map(real),
        Function::PsiCapital => psi_capital_with(x[0], x[1], x[2], x[3], cfg).map(real),
        Function::Levy => levy_density(x[0], x[1], x[2]).map(real),
        Function::MlKernel => ml_kernel_with(MLKernelParams::new(x[0], x[1], Complex64::new(x[2], x[3]))?, x[4], cfg),
    }
}

/// Evaluates the function on the parameter grid and writes the CSV.
pub fn run(function: &str, params: &Params, cfg: &QuadConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let f = Function::parse(function)?;
    let lists: Vec<Vec<f64>> = f
        .inputs()
        .iter()
        .map(|name| if optional_zero(name) { params.list_or(name, 0.0) } else { params.list(name) })
        .collect::<Result<_, _>>()?;
    let rows = product(&lists);
    log::info!("eval {function}: {} points", rows.len());
    let results: Vec<_> = rows.par_iter().map(|x| evaluate(f, x, cfg)).collect();

    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = f.inputs().iter().map(|s| s.to_string()).collect();
    if f.complex() {
        header.extend(["value_re".into(), "value_im".into()]);
    } else {
        header.push("value".into());
    }
    header.extend(["abs_err_estimate".into(), "method".into()]);
    w.write_record(&header).map_err(|e| io_error("writing CSV", e))?;
    for (x, r) in rows.iter().zip(results) {
        let r = r.map_err(|e| with_point(e, f, x))?;
        if r.accuracy_warning {
            log::warn!("eval {function} at {x:?}: accuracy warning (error estimate {:e})", r.abs_err_estimate);
        }
        let mut rec: Vec<String> = x.iter().map(|v| fmt17(*v)).collect();
        rec.push(fmt17(r.value.re));
        if f.complex() {
            rec.push(fmt17(r.value.im));
        }
        rec.push(fmt17(r.abs_err_estimate));
        rec.push(r.method.to_string());
        w.write_record(&rec).map_err(|e| io_error("writing CSV", e))?;
    }
    w.flush().map_err(|e| io_error("writing CSV", e))
}

fn with_point(e: fracsub::Error, f: Function, x: &[f64]) -> CliError {
    let at: Vec<String> = f.inputs().iter().zip(x).map(|(n, v)| format!("{n}={v}")).collect();
    match CliError::from(e) {
        CliError::Config(m) => CliError::Config(format!("{m} (at {})", at.join(" "))),
        CliError::Numerical(m) => CliError::Numerical(format!("{m} (at {})", at.join(" "))),
        other => other,
    }
}
