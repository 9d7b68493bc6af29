mod config;
mod error;
mod eval;
mod plot;
mod solve;

use clap::{Args, Parser, Subcommand};
use config::{FileGlobals, Params};
use error::{io_error, CliError};
use fracsub::verify::{run_suites, summary, CheckRecord, Suite, VerifyOptions};
use fracsub::QuadConfig;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Mittag-Leffler, Wright and scaled Wright functions, subordinated
/// resolvent families and fractional Cauchy problems.
#[derive(Debug, Parser)]
#[command(name = "fracsub", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// TOML file with top-level tol/seed/jobs/out and one [section] per command.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Relative tolerance of the quadrature routines.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    /// Seed of the randomized verification sweeps.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a function on the Cartesian product of its parameter lists.
    ///
    /// Values are a number, an array [a, b], a comma list a,b or a range lo:hi:n.
    Eval {
        /// ml, wright, psi, psi_capital, levy or ml_kernel.
        function: String,
        /// key=value parameters, e.g. alpha=0.5 beta=0.5 t=1 s=0:10:11.
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Run identity verification suites and write a JSON report.
    Verify {
        /// Suite tag or "all", then optional seed=N, budget=N.
        #[arg(value_name = "SUITE|KEY=VALUE")]
        args: Vec<String>,
    },
    /// Solve a fractional Cauchy problem: rl, rl-fracpower or caputo.
    Solve {
        kind: String,
        /// alpha, gamma, matrix=[[..]] | multiplication=SYMBOL | convolution=KERNEL,
        /// nx, grid=[lo..hi], x, t_end, n, report.
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Turn CSV output into whitespace-delimited blocks for gnuplot.
    Plotdata {
        #[arg(required = true)]
        sources: Vec<PathBuf>,
        /// Abscissa column (the time column in snapshot mode, default t).
        #[arg(long)]
        x: Option<String>,
        /// Ordinate columns.
        #[arg(long, value_delimiter = ',')]
        y: Vec<String>,
        /// Start a new block whenever this column changes.
        #[arg(long)]
        group: Option<String>,
        /// One block of (x, value) per time row of a solution CSV.
        #[arg(long)]
        snapshots: bool,
    },
}

struct Context {
    file: toml::Table,
    globals: FileGlobals,
    cfg: QuadConfig,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| io_error(&format!("cannot write {}", p.display()), e))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn setup(g: Global) -> Result<Context, CliError> {
    let file = config::load_file(g.config.as_deref())?;
    let globals = config::globals(&file)?;
    let mut cfg = QuadConfig::default();
    if let Some(tol) = g.tol.or(globals.tol) {
        cfg = cfg.with_tol(tol, cfg.abs_tol.min(tol));
    }
    cfg.validate().map_err(|e| CliError::Config(format!("--tol: {e}")))?;
    if let Some(jobs) = g.jobs.or(globals.jobs) {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    }
    let out = g.out.or_else(|| globals.out.clone().map(PathBuf::from));
    Ok(Context { file, seed: g.seed, globals, cfg, out })
}

fn verify(ctx: &Context, args: &[String]) -> Result<(), CliError> {
    let (overrides, positional): (Vec<String>, Vec<String>) = args.iter().cloned().partition(|a| a.contains('='));
    if positional.len() > 1 {
        return Err(CliError::Config(format!("verify takes one suite, got {}", positional.join(" "))));
    }
    let p = Params::new("verify", &ctx.file, &overrides)?;
    let tag = match positional.first() {
        Some(t) => t.clone(),
        None => p.opt_str("suite")?.unwrap_or_else(|| "all".into()),
    };
    let suites = Suite::parse(&tag)?;
    let opts = VerifyOptions {
        seed: ctx.seed.or(p.opt_u64("seed")?).or(ctx.globals.seed).unwrap_or(VerifyOptions::default().seed),
        budget: p.opt_u64("budget")?.map(|b| b as usize),
        cfg: ctx.cfg,
    };
    if opts.budget == Some(0) {
        return Err(CliError::Config("parameter 'budget' in [verify] must be positive".into()));
    }
    let records = run_suites(&suites, &opts);
    let mut out = sink(ctx.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &records).map_err(|e| io_error("writing report", e))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| io_error("writing report", e))?;
    let (passed, total, _) = summary(&records);
    eprintln!("verify {tag} (seed {}): {passed}/{total} checks passed", opts.seed);
    for r in records.iter().filter(|r| !r.pass) {
        eprintln!("  FAIL {} {}: residual {:.3e} > {:.1e}", r.suite, r.identity, r.residual, r.tolerance);
    }
    outcome(&records)
}

fn outcome(records: &[CheckRecord]) -> Result<(), CliError> {
    let (passed, total, all) = summary(records);
    if all {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} of {total} checks failed", total - passed)))
    }
}

fn solve_cmd(ctx: &Context, kind: &str, params: &[String]) -> Result<(), CliError> {
    let p = Params::new("solve", &ctx.file, params)?;
    let (v, report) = solve::run(kind, &p, &ctx.cfg)?;
    let mut out = sink(ctx.out.as_deref())?;
    v.write_csv(&mut out)?;
    out.flush().map_err(|e| io_error("writing CSV", e))?;
    let report_path = match p.opt_str("report")? {
        Some(r) => Some(PathBuf::from(r)),
        None => ctx.out.as_ref().map(|o| o.with_extension("residual.json")),
    };
    match report_path {
        Some(path) => {
            let mut w = sink(Some(&path))?;
            solve::write_report(&report, &mut w)?;
            w.flush().map_err(|e| io_error("writing report", e))
        }
        None => solve::write_report(&report, &mut std::io::stderr().lock()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = setup(cli.global)?;
    match cli.command {
        Command::Eval { function, params } => {
            let p = Params::new("eval", &ctx.file, &params)?;
            let mut out = sink(ctx.out.as_deref())?;
            eval::run(&function, &p, &ctx.cfg, &mut out)?;
            out.flush().map_err(|e| io_error("writing CSV", e))
        }
        Command::Verify { args } => verify(&ctx, &args),
        Command::Solve { kind, params } => solve_cmd(&ctx, &kind, &params),
        Command::Plotdata { sources, x, y, group, snapshots } => {
            let spec = plot::PlotSpec { sources, x, y, group, snapshots };
            let mut out = sink(ctx.out.as_deref())?;
            plot::run(&spec, &mut out)?;
            out.flush().map_err(|e| io_error("writing plot data", e))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FRACSUB_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) | Err(CliError::Closed) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracsub: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
