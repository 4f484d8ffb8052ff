use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dirlap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirlap")).args(args).output().unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", s(&out)]);
    let o = dirlap(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn gen_and_check() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "layered.json", &["--family", "layered", "--L", "6", "--width", "4", "--gamma", "2"]);
    let graph: Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(graph["vertices"].as_array().unwrap().len(), 24);
    let o = dirlap(&["check", s(&g)]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["satisfied"], Value::Bool(true));
    assert_eq!(report["max_violation"].as_f64(), Some(0.0));
}

#[test]
fn check_reports_violation_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "bad.json");
    std::fs::write(
        &g,
        r#"{"vertices":[{"id":0,"m":1},{"id":1,"m":1},{"id":2,"m":1}],
            "edges":[{"from":0,"to":1,"b":1},{"from":1,"to":2,"b":1},{"from":2,"to":0,"b":2}]}"#,
    )
    .unwrap();
    let o = dirlap(&["check", s(&g)]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["satisfied"], Value::Bool(false));
    // verifying a graph that violates the condition is an input error
    assert_eq!(dirlap(&["verify", s(&g)]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, r#"{"vertices":[{"id":1,"m":1}],"edges":[]}"#).unwrap();
    let o = dirlap(&["check", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert_eq!(dirlap(&["check", "/nonexistent/g.json"]).status.code(), Some(2));
    assert_eq!(dirlap(&["check", s(&bad), "--bogus"]).status.code(), Some(2));
    let g = gen(&dir, "c.json", &["--family", "cycle", "--n", "3"]);
    assert_eq!(dirlap(&["cheeger", s(&g), "--omega", "[5]"]).status.code(), Some(2));
    assert_eq!(dirlap(&["cheeger", s(&g), "--omega", "0,1"]).status.code(), Some(2));
    let big = gen(&dir, "big.json", &["--family", "cycle", "--n", "30"]);
    let o = dirlap(&["cheeger", s(&big), "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("22"));
}

#[test]
fn numrange_csv_rows() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "c.json", &["--family", "opposing"]);
    let w = path(&dir, "w.csv");
    let o = dirlap(&["numrange", s(&g), "--angles", "360", "--op", "normalized", "--out", s(&w)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&w).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,re,im");
    assert_eq!(lines.len(), 361);
    assert_eq!(lines[1].split(',').next(), Some("0"));
}

#[test]
fn cheeger_json_schema() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "c.json", &["--family", "cycle", "--n", "3"]);
    let o = dirlap(&["cheeger", s(&g), "--omega", "[0,1]", "--normalization", "beta-plus"]);
    assert!(o.status.success());
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["value"].as_f64(), Some(1.0));
    assert_eq!(r["witness"], serde_json::json!([0, 1]));
    assert_eq!(r["mode"], "Exact");
    assert_eq!(r["normalization"], "ByBetaPlus");

    let omega_file = path(&dir, "omega.json");
    std::fs::write(&omega_file, "[0]").unwrap();
    let o = dirlap(&["cheeger", s(&g), "--omega-file", s(&omega_file), "--mode", "heuristic"]);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["value"].as_f64(), Some(2.0));
    assert_eq!(r["mode"], "UpperBound");
}

#[test]
fn spectrum_and_operator_export_round_trip() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "c.json", &["--family", "cycle", "--n", "4"]);
    for ext in ["csv", "json"] {
        let op = path(&dir, &format!("op.{ext}"));
        let a = dirlap(&["spectrum", s(&g), "--op", "h", "--omega", "[0,1,2]", "--export-operator", s(&op)]);
        assert!(a.status.success());
        let b = dirlap(&["spectrum", "--operator", s(&op)]);
        assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
        assert_eq!(a.stdout, b.stdout);
        let v: Value = serde_json::from_slice(&b.stdout).unwrap();
        assert_eq!(v["kind"], "Dirichlet(H)");
        assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 3);
    }
    let o = dirlap(&["spectrum", s(&g), "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("re,im"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn verify_single_graph() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "c.json", &["--family", "cycle", "--n", "3"]);
    let o = dirlap(&["verify", s(&g), "--omega", "[0,1]"]);
    assert_eq!(o.status.code(), Some(0));
    let reports: Value = serde_json::from_slice(&o.stdout).unwrap();
    let ids: Vec<&str> = reports.as_array().unwrap().iter().map(|r| r["theorem_id"].as_str().unwrap()).collect();
    assert_eq!(
        ids,
        ["green", "bounded", "kyfan", "dirichlet_bounds", "cheeger_sandwich", "fujiwara"]
    );
    // omega = V violates the precondition of the Dirichlet bounds
    assert_eq!(dirlap(&["verify", s(&g), "--omega", "[0,1,2]"]).status.code(), Some(2));
    let o = dirlap(&["verify", s(&g)]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn infinity_csv() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "l.json", &["--family", "layered", "--L", "4", "--width", "3", "--gamma", "3"]);
    let o = dirlap(&["infinity", s(&g), "--layer-width", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "level,m_c,M_c,h_c,h_tilde_c,nu_dirichlet,ess_lower_bound");
    assert_eq!(lines.len(), 4);
    let o = dirlap(&["infinity", s(&g), "--root", "0", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["heavy_end"].is_boolean());
}

#[test]
fn outputs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = gen(&dir, "a.json", &["--family", "random", "--n", "12", "--cycles", "4", "--seed", "9"]);
    let b = gen(&dir, "b.json", &["--family", "random", "--n", "12", "--cycles", "4", "--seed", "9"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let run = || dirlap(&["verify", s(&a)]).stdout;
    assert_eq!(run(), run());
}
