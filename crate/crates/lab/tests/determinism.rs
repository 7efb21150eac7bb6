// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

use aplab::{preset, run, RunOptions};

fn files(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn run_into(name: &str, threads: usize) -> (tempfile::TempDir, Vec<(String, Vec<u8>)>) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = preset(name).unwrap();
    run(&cfg, &RunOptions { out_dir: Some(dir.path().into()), threads }).unwrap();
    let f = files(dir.path());
    (dir, f)
}

#[test]
fn repeated_runs_are_byte_identical() {
    for name in ["resource-table", "elimination-order", "kinetic-ap", "duhamel-identity"] {
        let (_a, x) = run_into(name, 1);
        let (_b, y) = run_into(name, 1);
        assert_eq!(x, y, "{name}");
        let (_c, z) = run_into(name, 4);
        assert_eq!(x, z, "{name} with 4 threads");
    }
}

#[test]
fn config_round_trip_keeps_the_hash() {
    let c = preset("diamond-properties").unwrap();
    let again = aplab::ExperimentConfig::from_json(&c.to_json()).unwrap();
    assert_eq!(c.hash(), again.hash());
}
