// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Report tables and atomic artifact writing.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::{LabError, LabResult};

/// A CSV table. Cells are pre-formatted so that output bytes are fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> LabResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| LabError::Csv(e.into_error().into()))
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j].as_str()).collect())
    }
}

/// Shortest round-trip form in scientific notation.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// One threshold test on a computed quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: String,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, target: format!("<= {limit:e}"), pass: value <= limit }
    }

    pub fn within(name: &str, value: f64, center: f64, tol: f64) -> Self {
        Self { name: name.into(), value, target: format!("{center} +- {tol}"), pass: (value - center).abs() <= tol }
    }

    pub fn range(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), value, target: format!("in [{lo}, {hi}]"), pass: value >= lo && value <= hi }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 1.0 } else { 0.0 }, target: "true".into(), pass: ok }
    }
}

/// File name and contents.
pub type Artifact = (String, Vec<u8>);

/// Writes every file to a temporary sibling first, then renames them into
/// place, so a failed run never leaves a partial file at a target path.
pub fn write_atomic(dir: &Path, files: &[Artifact]) -> LabResult<Vec<PathBuf>> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| LabError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let mut tmp = NamedTempFile::new_in(dir).map_err(io(dir))?;
        tmp.write_all(bytes).map_err(io(tmp.path()))?;
        tmp.as_file().sync_all().map_err(io(tmp.path()))?;
        staged.push((tmp, dir.join(name)));
    }
    let mut out = Vec::with_capacity(staged.len());
    for (tmp, target) in staged {
        tmp.persist(&target).map_err(|e| LabError::Io { path: target.clone(), source: e.error })?;
        out.push(target);
    }
    Ok(out)
}
