use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const CUBIC: &str =
    r#"{"dim":1,"origin":[-1],"shape":[3],"coeffs":[0.16666666666666666,0.6666666666666666,0.16666666666666666]}"#;
const DIFFERENCE: &str = r#"{"dim":1,"origin":[0],"shape":[2],"coeffs":[1.0,-1.0]}"#;

fn wienerlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wienerlab")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn invert_writes_filter_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let filter = write(dir.path(), "cubic.json", CUBIC);
    let out = dir.path().join("g.json");
    let run = wienerlab(&["invert", "--filter", &filter, "--radius", "40", "--tol", "1e-10", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));

    let g: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(g["origin"], serde_json::json!([-40]));
    let g0 = g["coeffs"][40].as_f64().unwrap();
    assert!((g0 - 3f64.sqrt()).abs() < 1e-9);

    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("g.report.json")).unwrap()).unwrap();
    assert!(report["residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["certificate"]["status"], "invertible");
    assert_eq!(report["decay"]["model"], "exponential");
    let rate = report["decay"]["rate_or_order"].as_f64().unwrap();
    assert!((rate - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-3);
    assert!(report["decay"]["C"].as_f64().unwrap() > 0.0);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let filter = write(dir.path(), "cubic.json", CUBIC);
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_wienerlab"))
            .args(["invert", "--filter", &filter, "--radius", "30"])
            .env("WIENERLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("0");
    let c = run("3");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn filter_round_trip_through_decay_fit_input() {
    // the canonical file written by `invert` reloads to the same bytes
    let dir = tempfile::tempdir().unwrap();
    let filter = write(dir.path(), "cubic.json", CUBIC);
    let out = dir.path().join("g.json");
    wienerlab(&["invert", "--filter", &filter, "--out", out.to_str().unwrap()]);
    let text = fs::read_to_string(&out).unwrap();
    let reparsed = wienerlab::io::filter_from_json(&text).unwrap();
    assert_eq!(wienerlab::io::filter_to_json(&reparsed).unwrap() + "\n", text);

    let fit = wienerlab(&["decay-fit", "--filter", out.to_str().unwrap()]);
    assert_eq!(fit.status.code(), Some(0));
    assert_eq!(stdout_json(&fit)["summary"]["model"], "exponential");
}

#[test]
fn singular_filter_fails_mathematically() {
    let dir = tempfile::tempdir().unwrap();
    let filter = write(dir.path(), "diff.json", DIFFERENCE);
    let run = wienerlab(&["invert", "--filter", &filter]);
    assert_eq!(run.status.code(), Some(2));
    assert_eq!(stderr_json(&run)["error"], "not_invertible");

    let run = wienerlab(&["invert-singular", "--filter", &filter, "--radius", "10"]);
    assert_eq!(run.status.code(), Some(0));
    let v = stdout_json(&run);
    assert_eq!(v["report"]["growth_order"], 0);
    assert!(v["filter"]["coeffs"].as_array().unwrap().iter().all(|c| c.as_f64() == Some(1.0)));

    let run = wienerlab(&["symbol-min", "--filter", &filter]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(stdout_json(&run)["status"], "likely_singular");
}

#[test]
fn usage_and_schema_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(wienerlab(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(wienerlab(&["invert"]).status.code(), Some(1));

    let missing = dir.path().join("missing.json");
    let run = wienerlab(&["invert", "--filter", missing.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    assert_eq!(stderr_json(&run)["error"], "usage");

    let bad = write(dir.path(), "bad.json", r#"{"dim":1,"origin":[0],"shape":[3],"coeffs":[1.0]}"#);
    let run = wienerlab(&["invert", "--filter", &bad]);
    assert_eq!(run.status.code(), Some(1));

    let run = wienerlab(&["grs-check", "--weight", r#"{"kind":"triangular","params":{}}"#, "--k", "1"]);
    assert_eq!(run.status.code(), Some(1));
    assert_eq!(stderr_json(&run)["error"], "format");

    let run = Command::new(env!("CARGO_BIN_EXE_wienerlab"))
        .args(["lemma-check"])
        .env("WIENERLAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn grs_verdicts() {
    let run = wienerlab(&["grs-check", "--weight", r#"{"kind":"exponential","params":{"r":0.5}}"#, "--k", "1"]);
    assert_eq!(run.status.code(), Some(0));
    let v = stdout_json(&run);
    assert_eq!(v["verdict"], "not_grs");
    assert!((v["extrapolated_limit"].as_f64().unwrap() - 0.5f64.exp()).abs() < 1e-12);

    let run = wienerlab(&["grs-check", "--weight", r#"{"kind":"polynomial","params":{"n":2}}"#, "--k", "1"]);
    assert_eq!(stdout_json(&run)["verdict"], "grs");

    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", r#"{"dim":2,"kind":"subexponential","params":{"r":1.0,"b":0.5}}"#);
    let run = wienerlab(&["grs-check", "--weight", &w, "--k", "1,-1"]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(stdout_json(&run)["submultiplicative"], true);
}

#[test]
fn spline_routes_agree_and_csv_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("kernel.csv");
    let run = wienerlab(&["spline-lagrange", "--degree", "3", "--route", "both", "--out", csv.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let v = stdout_json(&run);
    assert!(v["agreement"]["max_abs_diff"].as_f64().unwrap() <= 1e-6);
    for k in v["kernels"].as_array().unwrap() {
        assert_eq!(k["decay"]["model"], "exponential");
        assert!((k["decay"]["rate_or_order"].as_f64().unwrap() - 1.3170).abs() < 1e-3);
    }

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap();
    assert!(meta.starts_with("# grid_step=") && meta.contains("K=20") && meta.contains("decay=exponential"));
    assert_eq!(lines.next(), Some("x,value"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (x, v) = l.split_once(',').unwrap();
            (x.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 2 * 20 * 16 + 1);
    for (x, v) in rows {
        if x.fract() == 0.0 {
            let expected = if x == 0.0 { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-12, "φ_int({x}) = {v}");
        }
    }
}

#[test]
fn fourier_route_needs_a_symbol() {
    let custom = r#"{"kind":"custom","params":{"oversampling":1,"samples":{"dim":1,"origin":[-1],"shape":[3],"coeffs":[0.25,0.5,0.25]}}}"#;
    let run = wienerlab(&["spline-lagrange", "--generator", custom, "--route", "fourier"]);
    assert_eq!(run.status.code(), Some(1));
    let run = wienerlab(&["spline-lagrange", "--degree", "2", "--route", "fourier", "--symbol", "green"]);
    assert_eq!(run.status.code(), Some(1));
    let run = wienerlab(&["spline-lagrange", "--degree", "2", "--route", "both"]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
}

#[test]
fn reproduction_of_truncated_powers() {
    for target in ["plus", "abs"] {
        let run = wienerlab(&["reproduce", "--target", target]);
        assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
        assert!(stdout_json(&run)["report"]["max_residual"].as_f64().unwrap() <= 1e-6);
    }
    // a kernel window too narrow for K_sum leaves an unbounded tail
    let run = wienerlab(&["reproduce", "--radius", "10", "--k-sum", "3", "--power", "3"]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn lemma_check_reports_moment_bound() {
    let dir = tempfile::tempdir().unwrap();
    let filter = write(dir.path(), "cubic.json", CUBIC);
    let run = wienerlab(&["lemma-check", "--c", "1", "--n-max", "30", "--filter", &filter]);
    assert_eq!(run.status.code(), Some(0));
    let v = stdout_json(&run);
    assert!(v["lemma"]["max_ratio"].as_f64().unwrap() <= 1.0 + 1e-12);
    assert_eq!(v["derivative_growth"]["log_moments"].as_array().unwrap().len(), 31);
}
