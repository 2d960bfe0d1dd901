use std::fs;

use clap::Parser;
use cuspidal::cli::{execute, run, Cli};
use serde_json::Value;
use tempfile::TempDir;

fn cli(args: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("cuspidal").chain(args.iter().copied())).expect("arguments parse")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn decompose_constant_density() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", r#"{"terms":[{"c":1.0,"e":[0,0,0]}]}"#);
    let out: Value = serde_json::from_str(&execute(&cli(&["decompose", &f, "--no-check"])).unwrap()).unwrap();
    assert_eq!(out["alpha"][0].as_f64(), Some(1.0));
    assert!(out["beta"].as_array().unwrap().iter().all(|b| b.as_f64() == Some(0.0)));
}

#[test]
fn malformed_density_exits_with_input_code() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.json", "{\"terms\": [");
    assert_eq!(run(["cuspidal", "decompose", &f]), 2);
    assert_eq!(run(["cuspidal", "no-such-command"]), 2);
}

#[test]
fn actions_csv_has_header_and_rows() {
    let text = execute(&cli(&["actions", "--model", "cusp_local", "--grid", "3x3", "--format", "csv"])).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(cuspidal::quadrature::CSV_HEADER));
    assert_eq!(lines.count(), 9);
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("inv.json");
    let code = run(["cuspidal", "invariants", "--model", "cusp_local", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert!(v.is_object());
}

#[test]
fn lattice_half_vectors_do_not_return() {
    let args = ["lattice", "--model", "cusp_compact", "--point", "0.05,0.02", "--stratum", "wide"];
    let full: Value = serde_json::from_str(&execute(&cli(&args)).unwrap()).unwrap();
    assert_eq!(full["returned"], Value::Bool(true));
    let mut half = args.to_vec();
    half.extend(["--scale", "0.5"]);
    let half: Value = serde_json::from_str(&execute(&cli(&half)).unwrap()).unwrap();
    assert_eq!(half["returned"], Value::Bool(false));
}

#[test]
fn compare_detects_mu_shift() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"kind":"cusp_compact"}"#);
    let b = write(&dir, "b.json", r#"{"kind":"cusp_compact","mu_shift":1}"#);
    let v: Value = serde_json::from_str(&execute(&cli(&["compare", &a, &b])).unwrap()).unwrap();
    assert_eq!(v["equivalent"], Value::Bool(true));
    assert_eq!(v["k"].as_i64(), Some(-1));
}

#[test]
fn rejects_nonpositive_tolerance() {
    assert!(execute(&cli(&["invariants", "--model", "one_dof", "--tol", "0"])).is_err());
}
