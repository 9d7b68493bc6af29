use std::path::PathBuf;
use std::process::{Command, Output};

fn fracsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsub"))
        .args(args)
        .env("FRACSUB_LOG", "error")
        .output()
        .expect("run fracsub")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fracsub-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Data rows of a CSV as (header, rows).
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (h, rows) = csv_rows(text);
    let j = h.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name} in {h:?}"));
    rows.iter().map(|r| r[j].parse().unwrap()).collect()
}

#[test]
fn eval_psi_closed_form_row() {
    let o = fracsub(&["eval", "psi", "α=0.5", "β=0.5", "t=1", "s=2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("alpha,beta,t,s,value,abs_err_estimate,method\n"));
    let v = column(&out, "value")[0];
    assert!((v - 0.2075537487).abs() < 1e-10, "{v}");
}

#[test]
fn eval_ml_at_zero_is_one() {
    let o = fracsub(&["eval", "ml", "α=1", "β=1", "z=0"]);
    assert!(o.status.success());
    assert_eq!(column(&stdout(&o), "value_re"), vec![1.0]);
}

#[test]
fn eval_psi_capital_closed_form() {
    let o = fracsub(&["eval", "psi_capital", "γ=0.5", "α=0.5", "t=1", "s=1"]);
    assert!(o.status.success());
    let v = column(&stdout(&o), "value")[0];
    assert!((v - 0.0997355701).abs() < 1e-10, "{v}");
}

#[test]
fn eval_grid_is_a_product_in_input_order() {
    let o = fracsub(&["eval", "levy", "alpha=[0.25,0.5]", "s=1", "t=0.5:2:4", "--jobs", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(column(&out, "alpha"), vec![0.25, 0.25, 0.25, 0.25, 0.5, 0.5, 0.5, 0.5]);
    assert_eq!(column(&out, "t"), vec![0.5, 1.0, 1.5, 2.0, 0.5, 1.0, 1.5, 2.0]);
    let v = column(&out, "value");
    for (k, t) in [0.5f64, 1.0, 1.5, 2.0].into_iter().enumerate() {
        let want = (-1.0 / (4.0 * t)).exp() / (2.0 * std::f64::consts::PI.sqrt() * t.powf(1.5));
        assert!((v[4 + k] - want).abs() < 1e-9 * want, "t={t}: {} vs {want}", v[4 + k]);
    }
}

#[test]
fn eval_output_is_deterministic() {
    let args = ["eval", "wright", "lambda=-0.5,0.5", "mu=0.5", "z=-2:2:9", "z_im=0,0.5"];
    let a = fracsub(&args);
    let b = fracsub(&[&args[..], &["--jobs", "1"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_and_overrides() {
    let cfg = scratch("eval.toml");
    std::fs::write(&cfg, "[eval]\nalpha = 0.5\nbeta = 0.5\nt = 1\ns = 3\n").unwrap();
    let o = fracsub(&["--config", cfg.to_str().unwrap(), "eval", "psi", "s=2"]);
    assert!(o.status.success());
    assert_eq!(column(&stdout(&o), "s"), vec![2.0]);
}

#[test]
fn config_errors_exit_two_and_name_the_parameter() {
    let o = fracsub(&["eval", "psi", "alpha=0.5", "beta=0.5", "t=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("'s'"));

    let o = fracsub(&["eval", "psi", "alpha=1.5", "beta=0.5", "t=1", "s=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));

    for args in [
        &["eval", "nope", "x=1"][..],
        &["verify", "nope"],
        &["solve", "rl", "alpha=0.5"],
        &["solve", "rl", "matrix=[[1]]", "alpha=0.5"],
        &["solve", "heat", "matrix=[[0]]", "alpha=0.5"],
        &["--tol=-1", "eval", "ml", "alpha=1", "beta=1", "z=0"],
        &["--config", "/nonexistent/fracsub.toml", "eval", "ml", "alpha=1", "beta=1", "z=0"],
    ] {
        assert_eq!(fracsub(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_spectral_seed_is_reproducible() {
    let a = fracsub(&["verify", "spectral", "--seed", "7"]);
    let b = fracsub(&["verify", "suite=spectral", "seed=7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let records: Vec<serde_json::Value> = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(records.len(), 5);
    for r in &records {
        for key in ["identity", "params", "residual", "tolerance", "pass"] {
            assert!(r.get(key).is_some(), "{key} missing in {r}");
        }
        assert_eq!(r["pass"], true);
        assert!(r["residual"].as_f64().unwrap() <= 1e-7);
    }
}

#[test]
fn verify_levy_composition() {
    let o = fracsub(&["verify", "subordination-levy"]);
    assert!(o.status.success());
    let records: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r["residual"].as_f64().unwrap() <= 1e-6));
}

#[test]
fn solve_rl_zero_generator_gives_g_half() {
    let o = fracsub(&["solve", "rl", "matrix=[[0]]", "α=0.5", "n=10", "t_end=1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let t = column(&out, "t");
    let v = column(&out, "v");
    for (t, v) in t.iter().zip(&v) {
        let g = 1.0 / (std::f64::consts::PI * t).sqrt();
        assert!((v - g).abs() < 1e-9 * g, "t={t}: {v} vs {g}");
    }
}

#[test]
fn solve_caputo_scalar_matches_mittag_leffler() {
    // E_{0.7}(-t^{0.7}) from the power series in 50-digit arithmetic.
    let want = [(0.2, 0.71443720133222344), (0.5, 0.54582672905990226), (1.0, 0.39961197811559929)];
    let o = fracsub(&["solve", "caputo", "matrix=[[-1]]", "α=0.7", "n=40", "t_end=1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let t = column(&out, "t");
    let v = column(&out, "v");
    for (tw, w) in want {
        let k = t.iter().position(|x| (x - tw).abs() < 1e-12).unwrap();
        assert!((v[k] - w).abs() < 1e-4, "t={tw}: {} vs {w}", v[k]);
    }
}

#[test]
fn solve_multiplication_matches_closed_form_and_writes_report() {
    let out = scratch("laplacian.csv");
    let o = fracsub(&[
        "solve",
        "rl",
        "multiplication=laplacian_symbol",
        "α=0.5",
        "grid=[0.1..2]",
        "nx=6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let (header, rows) = csv_rows(&csv);
    assert_eq!(header.len(), 7);
    assert_eq!(header[1], "x=0.1");
    assert_eq!(rows.len(), 40);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.with_extension("residual.json")).unwrap()).unwrap();
    assert_eq!(report["closed_form_pass"], true);
    assert!(report["closed_form_error"].as_f64().unwrap() <= 1e-5);
    assert_eq!(report["residual"].as_array().unwrap().len(), 40);
}

#[test]
fn solve_fracpower_report_tolerances() {
    let out = scratch("fracpower.csv");
    let report = scratch("fracpower.json");
    let o = fracsub(&[
        "solve",
        "rl-fracpower",
        "multiplication=poisson_symbol",
        "alpha=0.5",
        "gamma=0.6",
        "grid=[-0.5, 0.5]",
        "nx=5",
        "n=40",
        &format!("report={}", report.display()),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["gamma"], 0.6);
    assert_eq!(r["residual_tolerance"], 1e-3);
    assert!(r["max_interior_residual"].as_f64().unwrap() <= 1e-3, "{r}");
    assert_eq!(r["closed_form_pass"], true);
}

#[test]
fn plotdata_blocks_per_group() {
    let src = scratch("profiles.csv");
    let o = fracsub(&[
        "eval",
        "psi",
        "alpha=0.25,0.5,0.75",
        "beta=0.75,0.5,0.25",
        "t=1",
        "s=0:4:5",
        "--out",
        src.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = fracsub(&["plotdata", src.to_str().unwrap(), "--x", "s", "--y", "value", "--group", "alpha"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let blocks: Vec<&str> = text.trim_end().split("\n\n").collect();
    assert_eq!(blocks.len(), 3);
    for b in blocks {
        let lines: Vec<&str> = b.lines().collect();
        assert_eq!(lines.len(), 15);
        assert!(lines.iter().all(|l| l.split_whitespace().count() == 2));
    }
}

#[test]
fn plotdata_levy_blocks_per_alpha() {
    let src = scratch("levy.csv");
    let o = fracsub(&["eval", "levy", "alpha=0.3,0.6", "s=1", "t=0.2:3:8", "--out", src.to_str().unwrap()]);
    assert!(o.status.success());
    let o = fracsub(&["plotdata", src.to_str().unwrap(), "--x", "t", "--y", "value,abs_err_estimate", "--group", "alpha"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let blocks: Vec<&str> = text.trim_end().split("\n\n").collect();
    assert_eq!(blocks.len(), 2);
    assert!(blocks[0].lines().all(|l| l.split_whitespace().count() == 3));
}

#[test]
fn plotdata_solution_snapshots() {
    let src = scratch("heat.csv");
    let o = fracsub(&["solve", "rl", "multiplication=poisson_symbol", "alpha=0.5", "nx=4", "n=6", "--out", src.to_str().unwrap()]);
    assert!(o.status.success());
    let o = fracsub(&["plotdata", src.to_str().unwrap(), "--snapshots"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let blocks: Vec<&str> = text.trim_end().split("\n\n").collect();
    assert_eq!(blocks.len(), 6);
    let xs: Vec<f64> = blocks[0].lines().map(|l| l.split_whitespace().next().unwrap().parse().unwrap()).collect();
    assert_eq!(xs.len(), 4);
    assert_eq!(xs[0], -1.0);
    assert_eq!(xs[3], 1.0);
}

#[test]
fn plotdata_malformed_source_exits_two() {
    let bad = scratch("bad.csv");
    std::fs::write(&bad, "a,b\n1,oops\n").unwrap();
    let o = fracsub(&["plotdata", bad.to_str().unwrap(), "--x", "a", "--y", "b"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fracsub(&["plotdata", bad.to_str().unwrap(), "--x", "a", "--y", "c"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fracsub(&["plotdata", "/nonexistent.csv", "--x", "a", "--y", "b"]);
    assert_eq!(o.status.code(), Some(2));
}
