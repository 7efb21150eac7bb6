// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Config in, artifacts out.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::LabResult;
use crate::exec::RayonExecutor;
use crate::experiments::{run_experiment, Outcome};
use crate::output::{write_atomic, Artifact, Check};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_OUT: &str = "aplab-out";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    /// 0 uses every core.
    pub threads: usize,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub summary: Value,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Artifact names and bytes. Contains nothing that depends on the
/// machine, the clock or the thread count.
pub fn render(cfg: &ExperimentConfig, outcome: &Outcome) -> LabResult<(Value, Vec<Artifact>)> {
    let mut files = Vec::new();
    for t in &outcome.tables {
        files.push((format!("{}.{}.csv", cfg.name, t.name), t.to_csv()?));
    }
    let summary_name = format!("{}.summary.json", cfg.name);
    let artifacts: Vec<&str> = files.iter().map(|f| f.0.as_str()).collect();
    let summary = json!({
        "tool": "aplab",
        "version": VERSION,
        "config_hash": format!("sha256:{}", cfg.hash()),
        "name": cfg.name,
        "kind": cfg.experiment.kind(),
        "seed": cfg.seed,
        "config": cfg,
        "results": outcome.results,
        "checks": outcome.checks,
        "all_checks_pass": outcome.checks.iter().all(|c| c.pass),
        "artifacts": artifacts,
    });
    let mut bytes = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    bytes.push(b'\n');
    files.push((summary_name, bytes));
    Ok((summary, files))
}

pub fn out_dir(cfg: &ExperimentConfig, opts: &RunOptions) -> PathBuf {
    opts.out_dir.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| Path::new(DEFAULT_OUT).to_path_buf())
}

pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> LabResult<RunReport> {
    cfg.validate()?;
    let exec = RayonExecutor::new(opts.threads)?;
    let outcome = run_experiment(cfg, &exec)?;
    let (summary, files) = render(cfg, &outcome)?;
    let files = write_atomic(&out_dir(cfg, opts), &files)?;
    Ok(RunReport { files, checks: outcome.checks, summary })
}
