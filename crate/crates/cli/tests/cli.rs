use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SQUARE: &str = r#"{"version":1,"objective":[1,1],"vertices":[[0,0],[1,0],[1,1],[0,1]],"closed":true}"#;

fn lpwork(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpwork")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn objective(trace: &Value) -> f64 {
    trace["objective_value"].as_f64().unwrap()
}

#[test]
fn convert_fills_constraints_idempotently() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "square.json", SQUARE);
    let once = dir.path().join("once.json");
    let out = lpwork(&["convert", "--input", s(&input), "--out", s(&once)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&once).unwrap()).unwrap();
    assert_eq!(doc["constraints"].as_array().unwrap().len(), 4);
    let twice = lpwork(&["convert", "--input", s(&once)]);
    let again = json(&twice);
    assert_eq!(again["constraints"], doc["constraints"]);
}

#[test]
fn convert_needs_hint_for_two_vertices() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "edge.json", r#"{"version":1,"objective":[0,1],"vertices":[[0,0],[1,0]],"closed":false}"#);
    let out = lpwork(&["convert", "--input", s(&input)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("interior hint required"));
    assert!(out.stdout.is_empty());
}

#[test]
fn solve_simplex_on_square() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "square.json", SQUARE);
    let out = lpwork(&["solve", "--algorithm", "simplex", "--input", s(&input), "--out", "-"]);
    assert_eq!(out.status.code(), Some(0));
    let trace = json(&out);
    assert_eq!(trace["version"], 1);
    assert_eq!(trace["algorithm"], "simplex");
    assert_eq!(trace["status"], "optimal");
    assert!((objective(&trace) - 2.0).abs() < 1e-12);
}

#[test]
fn ipm_step_scale_changes_iteration_count() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "square.json", SQUARE);
    let count = |alpha: &str| {
        let out = lpwork(&["solve", "--algorithm", "ipm", "--alpha-max", alpha, "--maxit", "1000", "--input", s(&input)]);
        assert_eq!(out.status.code(), Some(0));
        json(&out)["iterates"].as_array().unwrap().len()
    };
    assert!(count("0.1") > count("0.99"));
}

#[test]
fn pdhg_modes_agree() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "square.json", r#"{"version":1,"objective":[0.3,1],"vertices":[[0,0],[2,0],[2,1],[0,1.5]]}"#);
    let run = |mode: &str| {
        let out = lpwork(&["solve", "--algorithm", "pdhg", "--mode", mode, "--tol", "1e-9", "--maxit", "200000", "--input", s(&input)]);
        assert_eq!(out.status.code(), Some(0));
        objective(&json(&out))
    };
    assert!((run("equality") - run("inequality")).abs() < 1e-5);
}

#[test]
fn exit_codes_follow_status() {
    let dir = TempDir::new().unwrap();
    let open = write(&dir, "open.json", r#"{"version":1,"objective":[1,1],"vertices":[[0,1],[0,0],[1,0]],"closed":false}"#);
    assert_eq!(lpwork(&["solve", "--algorithm", "simplex", "--input", s(&open)]).status.code(), Some(2));
    assert_eq!(lpwork(&["solve", "--algorithm", "pdhg", "--maxit", "50", "--input", s(&open)]).status.code(), Some(4));
    let empty = write(
        &dir,
        "empty.json",
        r#"{"version":1,"objective":[1,0],"constraints":[{"a":[1,0],"b":-1},{"a":[-1,0],"b":-1}]}"#,
    );
    assert_eq!(lpwork(&["solve", "--algorithm", "simplex", "--input", s(&empty)]).status.code(), Some(3));
    let missing = dir.path().join("missing.json");
    let out = lpwork(&["solve", "--algorithm", "simplex", "--input", s(&missing)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn rejects_bad_step() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "square.json", SQUARE);
    let out = lpwork(&["solve", "--algorithm", "pdhg", "--step", "5", "--input", s(&input)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rotate_counts_and_angles() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "square.json", r#"{"version":1,"objective":[2,0],"vertices":[[0,0],[1,0],[1,1],[0,1]]}"#);
    let out = lpwork(&["rotate", "--algorithm", "simplex", "--steps", "4", "--input", s(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let traces = json(&out);
    let angles: Vec<f64> = traces.as_array().unwrap().iter().map(|t| t["settings"]["angle"].as_f64().unwrap()).collect();
    let expect = [0.0, 0.5, 1.0, 1.5].map(|k| k * std::f64::consts::PI);
    assert_eq!(angles.len(), 4);
    for (a, e) in angles.iter().zip(expect) {
        assert!((a - e).abs() < 1e-12);
    }
    let quarter = lpwork(&["rotate", "--algorithm", "simplex", "--quarter", "--angle-step", "0.001", "--input", s(&input)]);
    assert_eq!(json(&quarter).as_array().unwrap().len(), 1571);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "square.json", SQUARE);
    for alg in ["simplex", "ipm", "pdhg", "central-path"] {
        let a = lpwork(&["solve", "--algorithm", alg, "--input", s(&input)]);
        let b = lpwork(&["solve", "--algorithm", alg, "--input", s(&input)]);
        assert_eq!(a.stdout, b.stdout, "{alg}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn bench_reports_every_solver() {
    let out = lpwork(&["bench", "--m", "3", "--repeats", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(rows, ["simplex", "ipm", "central_path", "pdhg-eq", "pdhg-ineq"]);
    assert!(text.lines().next().unwrap().contains("iterations"));
}

#[test]
fn validate_reports_status() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "square.json", SQUARE);
    assert_eq!(lpwork(&["validate", "--input", s(&input)]).status.code(), Some(0));
    let bad = write(&dir, "bad.json", r#"{"version":1,"objective":[1,0],"vertices":[[0,0],[1,0],[0.2,0.2],[0,1]]}"#);
    let out = lpwork(&["validate", "--input", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
