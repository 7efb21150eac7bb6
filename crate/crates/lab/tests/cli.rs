// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

fn aplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aplab")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn entries(dir: &Path) -> usize {
    std::fs::read_dir(dir).map(|d| d.count()).unwrap_or(0)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn presets_are_listed() {
    let o = aplab(&["presets"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in [
        "cavity-purcell",
        "cavity-ap-sweep",
        "trotter-stiffness",
        "diamond-properties",
        "elimination-order",
        "kinetic-ap",
        "resource-table",
    ] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn written_presets_validate() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&aplab(&["presets", "--write", dir.path().to_str().unwrap()])), 0);
    let p = dir.path().join("kinetic-ap.json");
    assert_eq!(code(&aplab(&["validate", p.to_str().unwrap()])), 0);
}

#[test]
fn malformed_config_exits_2_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write(dir.path(), "bad.json", "{ \"name\": \"x\", \"experiment\": ");
    let o = aplab(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
    assert_eq!(code(&aplab(&["validate", &cfg])), 2);
}

#[test]
fn unknown_field_and_missing_file_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "u.json",
        r#"{"name": "r", "experiment": {"kind": "resources", "kappas": [10], "d_fast": [2], "d_slow": 2,
            "cs": [1], "delta": 0.001, "total_time": 1, "bogus": true}}"#,
    );
    assert_eq!(code(&aplab(&["validate", &cfg])), 2);
    assert_eq!(code(&aplab(&["run", "/nonexistent/config.json"])), 2);
}

#[test]
fn one_point_grid_exits_2_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write(
        dir.path(),
        "k.json",
        r#"{"name": "k", "experiment": {"kind": "kinetic", "params": {}, "eps_grid": [0.1], "dt_grid": [0.001]}}"#,
    );
    let o = aplab(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eps_grid"));
    assert_eq!(entries(&out), 0);
}

#[test]
fn numerical_failure_exits_3() {
    // One allowed step cannot reach 1e-12.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "n.json",
        r#"{"name": "n", "experiment": {"kind": "simulate",
            "model": {"type": "cavity", "omega_q": 1, "g": 0.1, "kappa": 1, "n_max": 2},
            "stiffness": {"eps_grid": [0.1, 0.05, 0.02, 0.01], "total_time": 1, "delta": 1e-12, "max_steps": 1}}}"#,
    );
    let out = dir.path().join("out");
    let o = aplab(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(entries(&out), 0);
}

#[test]
fn run_writes_summary_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = aplab(&["run", "resource-table", "--check", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("resource-table.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["version"], env!("CARGO_PKG_VERSION"));
    assert!(summary["config_hash"].as_str().unwrap().starts_with("sha256:"));
    assert_eq!(summary["all_checks_pass"], true);
    let csv = std::fs::read_to_string(dir.path().join("resource-table.resources.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 3 * 2);
    assert_eq!(entries(dir.path()), 2);
}

#[test]
fn cavity_preset_passes_its_checks() {
    let dir = tempfile::tempdir().unwrap();
    let o = aplab(&["run", "cavity-purcell", "--check", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("PASS purcell-max-entry-error"));
}

#[test]
fn failed_check_exits_4_only_with_flag() {
    // The damped-cavity gap check fails, so `--check` turns it into exit 4.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&aplab(&["run", "spectral-decay", "--out", out])), 0);
    assert_eq!(code(&aplab(&["run", "spectral-decay", "--check", "--out", out])), 4);
    assert!(dir.path().join("spectral-decay.summary.json").exists());
}
