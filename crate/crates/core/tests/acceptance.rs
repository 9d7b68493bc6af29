//! Acceptance suite: every criterion is checked against the records of the
//! verification suites (default seed, the same run as `fracsub verify all`)
//! and reported on its own PASS/FAIL line.
//!
//! Run with `cargo test --release -p fracsub-core --test acceptance -- --nocapture`.

use fracsub::verify::{run_suite, CheckRecord, Suite, VerifyOptions, NOISE_FLOOR, REFINEMENT_FACTOR};
use std::collections::BTreeMap;
use std::time::Instant;

struct Records(BTreeMap<&'static str, Vec<CheckRecord>>);

impl Records {
    fn suite(&self, tag: &str) -> &[CheckRecord] {
        self.0.get(tag).map_or(&[], |v| v.as_slice())
    }

    fn named<'a>(&'a self, tag: &str, identity: &'a str) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.suite(tag).iter().filter(move |r| r.identity == identity)
    }
}

/// Outcome of one criterion.
struct Verdict {
    pass: bool,
    detail: String,
}

/// All records pass, there are at least `min` of them and none is judged
/// against a tolerance looser than `tol`.
fn group<'a>(what: &str, records: impl Iterator<Item = &'a CheckRecord>, min: usize, tol: f64) -> Verdict {
    let records: Vec<&CheckRecord> = records.collect();
    let failed: Vec<String> = records
        .iter()
        .filter(|r| !r.pass || r.tolerance > tol)
        .map(|r| {
            let why = r.error.clone().unwrap_or_else(|| format!("residual {:.2e}, tolerance {:.0e}", r.residual, r.tolerance));
            format!("{} ({why})", r.identity)
        })
        .collect();
    let worst = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    let pass = failed.is_empty() && records.len() >= min;
    let mut detail = format!("{what}: {} checks, max residual {worst:.2e} (tol {tol:.0e})", records.len());
    if records.len() < min {
        detail.push_str(&format!("; expected at least {min}"));
    }
    if !failed.is_empty() {
        detail.push_str(&format!("; failing: {}", failed.join(", ")));
    }
    Verdict { pass, detail }
}

fn all(vs: Vec<Verdict>) -> Verdict {
    Verdict {
        pass: vs.iter().all(|v| v.pass),
        detail: vs.into_iter().map(|v| v.detail).collect::<Vec<_>>().join("; "),
    }
}

fn refines(r: &CheckRecord, factor: f64) -> bool {
    match (r.refinement.first(), r.refinement.last()) {
        (Some(&first), Some(&last)) if r.refinement.len() >= 2 => last <= factor * first || last <= NOISE_FLOOR,
        _ => false,
    }
}

fn refinement(what: &str, records: Vec<&CheckRecord>, factor: f64) -> Verdict {
    let bad: Vec<String> = records.iter().filter(|r| !refines(r, factor)).map(|r| format!("{} {:?}", r.identity, r.refinement)).collect();
    let detail = if bad.is_empty() {
        format!("{what}: {} refinement studies converge", records.len())
    } else {
        format!("{what}: not converging under refinement: {}", bad.join(", "))
    };
    Verdict { pass: bad.is_empty() && !records.is_empty(), detail }
}

fn criteria(r: &Records) -> Vec<(&'static str, Verdict)> {
    let psi_id = |id| r.named(Suite::PsiIdentities.tag(), id);
    let ode: Vec<&CheckRecord> = r
        .suite("ode-residual")
        .iter()
        .filter(|x| x.identity.starts_with("rl_residual") || x.identity.starts_with("caputo_residual"))
        .collect();
    let grid_resolvent: Vec<&CheckRecord> =
        r.suite("resolvent").iter().filter(|x| x.identity != "resolvent_equation_matrix").collect();
    let singular: Vec<&CheckRecord> = r.suite("singular").iter().collect();
    vec![
        ("closed-form psi_{1/2,1/2} vs heat kernel", group("t in [0.1,5], s in [0,10]", r.named("closed-form", "psi_half_heat_kernel"), 1, 1e-8)),
        ("closed-form psi_{1/2,0} vs Levy density", group("t in [0.1,5], s in [0,10]", r.named("closed-form", "levy_half"), 1, 1e-8)),
        ("closed-form Psi_{1/2,1/2}", group("t, s in [0.2,3]", r.named("closed-form", "psi_capital_half"), 1, 1e-6)),
        (
            "psi identity sweeps",
            all(vec![
                group("laplace_t", psi_id("laplace_t"), 50, 1e-6),
                group("laplace_s", psi_id("laplace_s"), 50, 1e-6),
                group("double_laplace", psi_id("double_laplace"), 50, 1e-6),
                group("conv_shift", psi_id("conv_shift"), 50, 1e-6),
                group("moment", psi_id("moment"), 50, 1e-7),
                group("nonnegativity", psi_id("nonnegativity"), 1, 1e-12),
            ]),
        ),
        ("Wright moment identity", group("moment", r.named("moment", "moment"), 50, 1e-7)),
        (
            "two-parameter subordination",
            all(vec![
                group("random", r.named("subordination", "subordination"), 20, 1e-6),
                group("Mainardi", r.named("subordination", "subordination_mainardi"), 1, 1e-6),
                group("Levy", r.named("subordination", "subordination_levy"), 1, 1e-6),
                group("explicit", r.named("subordination", "subordination_explicit"), 1, 1e-6),
            ]),
        ),
        (
            "RL shift identity",
            all(vec![
                group("u > 0", r.named("rl-shift", "rl_shift"), 20, 1e-6),
                group("u = 0", r.named("rl-shift", "rl_shift_at_zero"), 1, 1e-6),
            ]),
        ),
        (
            "singular algebraic identity",
            all(vec![
                group("validated points", singular.iter().copied(), 3, 1e-4),
                refinement("mesh refinement", singular.clone(), 1.0),
            ]),
        ),
        ("spectral inclusion", group("random 3x3 matrices", r.named("spectral", "spectral_inclusion"), 5, 1e-7)),
        (
            "resolvent equation",
            all(vec![
                group("matrix generators", r.named("resolvent", "resolvent_equation_matrix"), 1, 1e-7),
                group("grid generators", grid_resolvent.iter().copied(), 2, 1e-4),
                Verdict {
                    pass: grid_resolvent.iter().all(|x| x.refinement.len() >= 3),
                    detail: format!(
                        "grid levels {:?}",
                        grid_resolvent.iter().map(|x| x.refinement.len()).collect::<Vec<_>>()
                    ),
                },
            ]),
        ),
        ("Laplace characterization", group("matrix families", r.named("laplace", "laplace_characterization"), 1, 1e-5)),
        ("closed-form Cauchy solutions", group("RL and fractional power", r.suite("cauchy").iter(), 6, 1e-5)),
        (
            "fractional ODE residuals",
            all(vec![
                group("interior residuals", ode.iter().copied(), 4, 1e-3),
                refinement("halving", ode.clone(), REFINEMENT_FACTOR),
                group("all ode checks", r.suite("ode-residual").iter(), 4, 10.0),
            ]),
        ),
        ("sine-family scalar model", group("t in [0.1,3]", r.suite("sine-model").iter(), 1, 1e-6)),
    ]
}

#[test]
fn acceptance_criteria() {
    let opts = VerifyOptions::default();
    let start = Instant::now();
    let mut map = BTreeMap::new();
    for suite in Suite::ALL {
        let t = Instant::now();
        let records = run_suite(suite, &opts);
        println!("suite {:<14} {:>4} records in {:>6.1} s", suite.tag(), records.len(), t.elapsed().as_secs_f64());
        map.insert(suite.tag(), records);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let records = Records(map);

    println!();
    let verdicts = criteria(&records);
    for (k, (title, v)) in verdicts.iter().enumerate() {
        println!("criterion {:>2} {} {title}: {}", k + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("verification sweep took {elapsed:.1} s (seed {})", opts.seed);

    let stray: Vec<&CheckRecord> = records.0.values().flatten().filter(|r| !r.pass).collect();
    for r in &stray {
        println!("failing record: {} {} residual {:.3e} tolerance {:.1e}", r.suite, r.identity, r.residual, r.tolerance);
    }
    let failed: Vec<usize> = verdicts.iter().enumerate().filter(|(_, (_, v))| !v.pass).map(|(k, _)| k + 1).collect();
    assert_eq!(verdicts.len(), 14);
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
    assert!(stray.is_empty(), "{} failing records", stray.len());
}
