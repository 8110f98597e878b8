//! Black-box tests of the command-line binary: exit-code contract, report
//! determinism, and artifact emission.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fockforge")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env_remove("FOCKFORGE_THREADS")
        .output()
        .expect("binary must run")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// A 3-site, 2-component model with a constant exchange block of norm 1/2
/// on the diagonal and a unimodular cross weight; every check passes on it.
const GOOD_SPEC: &str = r#"{
  "mode": "multicomponent",
  "n_sites": 3,
  "internal_dim": 2,
  "rule": {"kind": "constant", "matrix": [
    [[0.5,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]],
    [[0.0,0.0],[0.0,0.0],[0.0,-1.0],[0.0,0.0]],
    [[0.0,0.0],[0.0,1.0],[0.0,0.0],[0.0,0.0]],
    [[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.5,0.0]]
  ]},
  "n_max": 3,
  "tol": 1e-8
}"#;

/// Self-adjoint contraction that violates the braid relation: a diagonal
/// operator with distinct weights (the two triple products differ entrywise).
const NON_BRAIDED_SPEC: &str = r#"{
  "mode": "abstract",
  "h_dim": 2,
  "t": [
    [[0.5,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]],
    [[0.0,0.0],[0.3,0.0],[0.0,0.0],[0.0,0.0]],
    [[0.0,0.0],[0.0,0.0],[0.2,0.0],[0.0,0.0]],
    [[0.0,0.0],[0.0,0.0],[0.0,0.0],[0.1,0.0]]
  ],
  "n_max": 3,
  "tol": 1e-8
}"#;

/// Exchange block with operator norm 2: not a contraction.
const EXPANSIVE_SPEC: &str = r#"{
  "mode": "multicomponent",
  "n_sites": 3,
  "internal_dim": 2,
  "rule": {"kind": "constant", "matrix": [
    [[2.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]],
    [[0.0,0.0],[2.0,0.0],[0.0,0.0],[0.0,0.0]],
    [[0.0,0.0],[0.0,0.0],[2.0,0.0],[0.0,0.0]],
    [[0.0,0.0],[0.0,0.0],[0.0,0.0],[2.0,0.0]]
  ]},
  "n_max": 2,
  "tol": 1e-8
}"#;

#[test]
fn good_spec_passes_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "good.json", GOOD_SPEC);
    let out = run(&["check", "--spec", &spec]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "stdout:\n{stdout}");
    assert!(stdout.contains("PASS"), "stdout:\n{stdout}");
    assert!(!stdout.contains("FAIL "), "stdout:\n{stdout}");
}

#[test]
fn malformed_json_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "bad.json", "{ not json");
    let out = run(&["check", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_field_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "bad.json", r#"{"mode":"abstract","bogus":1}"#);
    let out = run(&["check", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn expansive_block_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "expansive.json", EXPANSIVE_SPEC);
    let out = run(&["check", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("malformed"), "stderr:\n{stderr}");
}

#[test]
fn braid_violation_is_a_check_failure() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "nonbraided.json", NON_BRAIDED_SPEC);
    let out = run(&["check", "--spec", &spec]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(1), "stdout:\n{stdout}");
    assert!(stdout.contains("FAIL t_yang_baxter"), "stdout:\n{stdout}");
}

/// Free (T = 0) abstract spec on a 4-dim one-particle space; cheap to build,
/// but deep overrides push the level dimension 4^n past the budget.
fn wide_abstract_spec() -> String {
    let zero_row = vec![[0.0f64, 0.0f64]; 16];
    let t: Vec<_> = (0..16).map(|_| zero_row.clone()).collect();
    serde_json::json!({
        "mode": "abstract",
        "h_dim": 4,
        "t": t,
        "n_max": 2,
        "tol": 1e-8
    })
    .to_string()
}

#[test]
fn depth_budget_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "wide.json", &wide_abstract_spec());
    let out = run(&["check", "--spec", &spec, "--n-max", "9"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn level_dimension_budget_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // 4^7 = 16384 > 8192 while the depth itself is within range.
    let spec = write(dir.path(), "wide.json", &wide_abstract_spec());
    let out = run(&["check", "--spec", &spec, "--n-max", "7"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn depth_beyond_sites_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "good.json", GOOD_SPEC);
    let out = run(&["check", "--spec", &spec, "--n-max", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "good.json", GOOD_SPEC);
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    let out1 = run(&["check", "--spec", &spec, "--threads", "2", "--json", r1.to_str().unwrap()]);
    let out2 = run(&["check", "--spec", &spec, "--threads", "2", "--json", r2.to_str().unwrap()]);
    assert_eq!(out1.status.code(), Some(0));
    assert_eq!(out2.status.code(), Some(0));
    let b1 = std::fs::read(&r1).unwrap();
    let b2 = std::fs::read(&r2).unwrap();
    assert_eq!(b1, b2, "reports differ between identical runs");
    assert!(!String::from_utf8_lossy(&b1).contains("elapsed"), "wall time must stay out of the report");
}

#[test]
fn emit_operator_has_expected_shape_and_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "good.json", GOOD_SPEC);
    let out1 = run(&["emit", "--spec", &spec, "--what", "T"]);
    assert_eq!(out1.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out1.stdout).unwrap();
    let rows = v["rows"].as_u64().unwrap();
    assert_eq!(rows, 36, "T acts on the square of the 6-dim one-particle space");
    let out2 = run(&["emit", "--spec", &spec, "--what", "T"]);
    assert_eq!(out1.stdout, out2.stdout, "emitted artifact must be bit-stable");
}

#[test]
fn emit_projection_requires_valid_level() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "good.json", GOOD_SPEC);
    let out = run(&["emit", "--spec", &spec, "--what", "proj_n", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["emit", "--spec", &spec, "--what", "proj_n", "--n", "7"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["emit", "--spec", &spec, "--what", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fixtures_filter_rejects_unknown_name() {
    let out = run(&["fixtures", "no_such_fixture"]);
    assert_eq!(out.status.code(), Some(2));
}
