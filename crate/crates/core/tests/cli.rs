use std::path::Path;
use std::process::{Command, Output};

fn lipcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipcone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn corpus_list_succeeds() {
    let out = lipcone(&["corpus", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["names"][0], "cusp");
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(lipcone(&["analyze", "--set", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(lipcone(&["analyze", "--corpus", "nope"]).status.code(), Some(2));
    assert_eq!(lipcone(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lipcone(&["kx", "--corpus", "cusp"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"name":"bad","ambient":{"kind":"real","dim":2},"variables":["x","y"],"equations":["x^ + y"]}"#,
    );
    let out = lipcone(&["analyze", "--set", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn isolated_point_is_a_sampling_failure() {
    let dir = tempfile::tempdir().unwrap();
    let set = write(
        dir.path(),
        "point.json",
        r#"{"name":"point","ambient":{"kind":"real","dim":2},"variables":["x","y"],"equations":["x^2 + y^2"]}"#,
    );
    let out = lipcone(&["analyze", "--set", &set, "--samples", "400"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn set_file_analyze_writes_csv_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let set = write(
        dir.path(),
        "line.json",
        r#"{"name":"line","ambient":{"kind":"real","dim":2},"variables":["x","y"],"equations":["y - x^2"]}"#,
    );
    let target = dir.path().join("report.csv");
    let out = lipcone(&[
        "analyze",
        "--set",
        &set,
        "--local-dim",
        "1",
        "--samples",
        "2000",
        "--format",
        "csv",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&target).unwrap();
    assert!(csv.starts_with("t,lambda,worst_inner,worst_outer\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn kx_on_the_cusp_tangent() {
    let out = lipcone(&["kx", "--corpus", "cusp", "--direction", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["k"], 2);
    assert_eq!(v["result"]["stable"], true);
}

#[test]
fn symbolic_cone_and_export() {
    let out = lipcone(&["cone", "--corpus", "complex-3.14", "--symbolic"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["symbolic_cone"], serde_json::json!(["y*(x^2+y^2)"]));
    let out = lipcone(&["corpus", "export", "parabola"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["name"], "parabola");
}

#[test]
fn analyze_is_deterministic_and_timings_opt_in() {
    let a = lipcone(&["analyze", "--corpus", "parabola", "--seed", "3"]);
    let b = lipcone(&["analyze", "--corpus", "parabola", "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["result"]["verdict"], "LNE-consistent");
    assert_eq!(v["timings_ms"], serde_json::json!({}));
    let t = lipcone(&["analyze", "--corpus", "parabola", "--timings"]);
    let v: serde_json::Value = serde_json::from_slice(&t.stdout).unwrap();
    assert!(v["timings_ms"]["profile"].as_f64().unwrap() >= 0.0);
}
