//! End-to-end runs of the binary: exit codes, output shape and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn state(&self, name: &str, body: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermal-renyi"))
        .args(args)
        .output()
        .unwrap()
}

fn p(path: &std::path::Path) -> &str {
    path.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn as_f64(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.as_f64().unwrap(),
        Value::String(s) if s == "inf" => f64::INFINITY,
        other => panic!("not numeric: {other}"),
    }
}

#[test]
fn threshold_reports_argmin_and_ratios() {
    let f = Fixture::new();
    let r = f.state("r.json", r#"{"temps": [1, 3]}"#);
    let s = f.state("s.json", r#"{"temps": [2, 2]}"#);
    let out = run(&["threshold", p(&r), p(&s)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(as_f64(&v["alpha_star"]), 2.0);
    assert_eq!(v["argmin_modes"], serde_json::json!([1]));
    assert_eq!(v["ratios"].as_array().unwrap().len(), 1);
}

#[test]
fn threshold_unbounded_and_malformed() {
    let f = Fixture::new();
    let r = f.state("r.json", r#"{"temps": [5, 4]}"#);
    let s = f.state("s.json", r#"{"temps": [2, 2]}"#);
    let out = run(&["threshold", p(&r), p(&s)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["alpha_star"], "inf");

    let bad = f.state("bad.json", r#"{"temps": [-1]}"#);
    let out = run(&["threshold", p(&bad), p(&s)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn threshold_support_violation_is_a_warning() {
    let f = Fixture::new();
    let r = f.state("r.json", r#"{"temps": ["inf"]}"#);
    let s = f.state("s.json", r#"{"temps": ["inf"]}"#);
    let r2 = f.state("r2.json", r#"{"temps": [1.0]}"#);
    let out = run(&["threshold", p(&r2), p(&s)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["warning"].is_string());
    assert_eq!(v["support_violation"], serde_json::json!([1]));
    assert_eq!(run(&["threshold", p(&r), p(&s)]).status.code(), Some(0));
}

#[test]
fn entropy_of_identical_states_is_zero() {
    let f = Fixture::new();
    let r = f.state(
        "r.json",
        r#"{"temps": [1.3, 0.7], "displacement": [[0.4, -0.2], [1, 0]]}"#,
    );
    let out = run(&["entropy", p(&r), p(&r), "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["finite"], true);
    assert!(as_f64(&v["value"]).abs() < 1e-12);
    assert_eq!(v["method"], "displaced-series");
}

#[test]
fn entropy_past_threshold_carries_witness() {
    let f = Fixture::new();
    let r = f.state("r.json", r#"{"temps": [1], "displacement": [[1, 0]]}"#);
    let s = f.state("s.json", r#"{"temps": [2]}"#);
    let out = run(&["entropy", p(&r), p(&s), "--alpha", "2.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["finite"], false);
    assert_eq!(v["value"], "inf");
    assert_eq!(v["witness"]["kind"], "threshold");
    assert_eq!(v["witness"]["mode"], 1);
    assert_eq!(as_f64(&v["witness"]["alpha_star"]), 2.0);
}

#[test]
fn entropy_thermal_route_and_errors() {
    let f = Fixture::new();
    let r = f.state("r.json", r#"{"temps": [1]}"#);
    let s = f.state("s.json", r#"{"temps": [2]}"#);
    let out = run(&["entropy", p(&r), p(&s), "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["method"], "thermal-closed-form");
    // ln[(1-e^{-1})^{1/2}(1-e^{-2})^{1/2} / (1 - e^{-3/2})] / (1/2 - 1)
    let (a, b, c) = (
        1.0 - (-1.0f64).exp(),
        1.0 - (-2.0f64).exp(),
        1.0 - (-1.5f64).exp(),
    );
    let want = -2.0 * ((a * b).sqrt() / c).ln();
    assert!((as_f64(&v["value"]) - want).abs() < 1e-14);

    assert_eq!(
        run(&["entropy", p(&r), p(&s), "--alpha", "1"])
            .status
            .code(),
        Some(2)
    );

    let vac = f.state(
        "vac.json",
        r#"{"temps": ["inf"], "displacement": [[1, 0]]}"#,
    );
    let out = run(&["entropy", p(&vac), p(&s), "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("faithful"));
}

#[test]
fn sweep_csv_shape_and_flip() {
    let f = Fixture::new();
    let r = f.state("r.json", r#"{"temps": [1]}"#);
    let s = f.state("s.json", r#"{"temps": [2]}"#);
    let args = [
        "sweep",
        p(&r),
        p(&s),
        "--alpha-min",
        "0.1",
        "--alpha-max",
        "3.0",
        "--steps",
        "30",
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,finite,d_alpha,tail_bound,terms"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let alpha: f64 = cols[0].parse().unwrap();
        assert_eq!(cols[1] == "true", alpha < 2.0, "{line}");
        assert_eq!(cols[1] == "false", cols[2] == "inf");
    }
    // byte-deterministic
    assert_eq!(run(&args).stdout, out.stdout);
}

#[test]
fn sweep_edge_cases() {
    let f = Fixture::new();
    let r = f.state("r.json", r#"{"temps": [1], "displacement": [[0.5, 0.5]]}"#);
    let out = run(&[
        "sweep",
        p(&r),
        p(&r),
        "--alpha-min",
        "0.2",
        "--alpha-max",
        "2",
        "--steps",
        "4",
        "--out",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|row| as_f64(&row["d_alpha"]).abs() < 1e-12));

    let out = run(&[
        "sweep",
        p(&r),
        p(&r),
        "--alpha-min",
        "0.5",
        "--alpha-max",
        "2",
        "--steps",
        "1",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("5.0000000000000000e-1,"));

    let out = run(&[
        "sweep",
        p(&r),
        p(&r),
        "--alpha-min",
        "0.5",
        "--alpha-max",
        "1.5",
        "--steps",
        "3",
    ]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha = 1"));

    let out = run(&[
        "sweep",
        p(&r),
        p(&r),
        "--alpha-min",
        "2",
        "--alpha-max",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_exit_codes() {
    let out = run(&["validate", "--dim", "96"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["pass"], true);

    let out = run(&["validate", "--dim", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(as_f64(&json(&out)["max_relative_deviation"]) > 0.0);

    assert_eq!(run(&["validate", "--dim", "5000"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--dim", "1"]).status.code(), Some(2));
}

#[test]
fn validate_thermal_checks_at_64() {
    let out = run(&["validate", "--dim", "64"]);
    let v = json(&out);
    for check in v["checks"].as_array().unwrap() {
        if check["name"].as_str().unwrap().starts_with("thermal") {
            assert_eq!(check["pass"], true, "{check}");
        }
    }
}

#[test]
fn validate_file_case() {
    let f = Fixture::new();
    let r = f.state(
        "r.json",
        r#"{"temps": [1.2, 0.8], "displacement": [[0.3, 0], [0, -0.4]]}"#,
    );
    let s = f.state("s.json", r#"{"temps": [2.0, 2.2]}"#);
    let out = run(&[
        "validate",
        "--case",
        "file",
        "--rho",
        p(&r),
        "--sigma",
        p(&s),
        "--dim",
        "24",
        "--alpha",
        "0.5",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        run(&[
            "validate",
            "--case",
            "file",
            "--rho",
            p(&r),
            "--sigma",
            p(&s),
            "--dim",
            "65"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn weyl_scan_counts_and_guard() {
    let out = run(&["weyl-scan", "--u-re", "1", "--j-max", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["count"].as_u64().unwrap() >= 100);
    assert_eq!(v["all_witnesses_clear_floor"], true);

    let out = run(&[
        "weyl-scan",
        "--u-re",
        "-0.5",
        "--u-im",
        "-0.5",
        "--j-max",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(0));

    assert_eq!(run(&["weyl-scan", "--u-re", "0"]).status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}
