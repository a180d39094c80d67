use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("model.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn bvw(dir: &Path, config: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvw"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn report(dir: &Path, file: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out").join(file)).unwrap()).unwrap()
}

#[test]
fn cme_passes_for_square() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{"n": 2, "f": "t^2"}"#);
    let out = bvw(tmp.path(), &cfg, &["--check", "cme", "check"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(tmp.path(), "check.json");
    assert_eq!(r["suites"]["cme"]["cme_residual"], "0");
    assert_eq!(r["mode"], "exact");
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn non_invariant_action_fails_verification() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{"n": 2, "s0": "x1"}"#);
    let out = bvw(tmp.path(), &cfg, &["--check", "cme", "check"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(tmp.path(), "check.json");
    assert_eq!(r["ok"], false);
    assert_ne!(r["suites"]["cme"]["invariance_residual"], "0");
}

#[test]
fn lie_suite_for_su3() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{"n": 3}"#);
    let out = bvw(tmp.path(), &cfg, &["--check", "lie", "check"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(tmp.path(), "check.json");
    assert_eq!(r["suites"]["lie"]["jacobi_max_residual"], 0.0);
    assert_eq!(r["suites"]["lie"]["antisymmetry_max_residual"], 0.0);
}

#[test]
fn every_suite_passes_for_casimir() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"n": 2, "casimir": [[], ["1"]], "window": {"kmin": -1, "kmax": 1, "D": 2}, "psi": {"inline": "B1*x1 + B2*x2 + B3*x3"}}"#,
    );
    let out = bvw(tmp.path(), &cfg, &["check"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let r = report(tmp.path(), "check.json");
    for suite in ["lie", "triple", "cme", "qme", "hochschild", "brst"] {
        assert_eq!(r["suites"][suite]["ok"], true, "{suite}");
    }
}

#[test]
fn config_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let cases = [
        r#"{"n": 2, "f": "t^"}"#,
        r#"{"n": 1}"#,
        r#"{"n": 2, "d0": [["1", "2"], ["3", "4"]]}"#,
        r#"{"n": 2, "psi": {"inline": "x*1"}}"#,
        r#"not json"#,
        r#"{"n": 2, "unknown": true}"#,
    ];
    for body in cases {
        let cfg = write_config(tmp.path(), body);
        let out = bvw(tmp.path(), &cfg, &["check"]);
        assert_eq!(out.status.code(), Some(2), "{body}");
    }
    let cfg = write_config(tmp.path(), r#"{"n": 2, "s0": "x1 +\n (x2"}"#);
    let out = bvw(tmp.path(), &cfg, &["check"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2:5"));
    let out = bvw(tmp.path(), &tmp.path().join("missing.json"), &["check"]);
    assert_eq!(out.status.code(), Some(2));
    let cfg = write_config(tmp.path(), r#"{"n": 2}"#);
    assert_eq!(
        bvw(tmp.path(), &cfg, &["--check", "nonsense", "check"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bvw(tmp.path(), &cfg, &["--window", "3:1:0", "check"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bvw(tmp.path(), &cfg, &["--check", "cme", "check"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn exports_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"n": 2, "f": ["0", "0", "1"], "window": {"kmin": -1, "kmax": 0, "D": 1}}"#,
    );
    for what in ["triple", "actions", "pair", "matrices"] {
        assert_eq!(
            bvw(tmp.path(), &cfg, &["export", what]).status.code(),
            Some(0),
            "{what}"
        );
        let file = tmp.path().join("out").join(format!("export_{what}.json"));
        let first = std::fs::read(&file).unwrap();
        bvw(tmp.path(), &cfg, &["export", what]);
        assert_eq!(first, std::fs::read(&file).unwrap(), "{what}");
    }
    let actions = report(tmp.path(), "export_actions.json");
    assert!(actions["data"]["s0"].is_array());
    assert!(actions["data"]["gauge_fixed"].is_array());
}

#[test]
fn cohomology_reports() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"n": 2, "casimir": [[], ["1"]], "psi": {"inline": "B1*x1 + B2*x2 + B3*x3"}}"#,
    );
    let out = bvw(tmp.path(), &cfg, &["--window", "-2:2:2", "cohomology"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(tmp.path(), "cohomology.json");
    assert_eq!(
        r["suites"]["bv"]["report"]["degrees"]
            .as_array()
            .unwrap()
            .len(),
        5
    );
    assert!(r["suites"]["brst"].is_object());
    assert_eq!(r["suites"]["hochschild_conjugacy"]["ok"], true);

    let out = bvw(
        tmp.path(),
        &cfg,
        &["--window", "0:0:0", "--mode", "float", "cohomology"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(tmp.path(), "cohomology.json");
    assert_eq!(r["suites"]["bv"]["report"]["degrees"][0]["dim"], 1);
    assert_eq!(r["mode"], "float");
}
