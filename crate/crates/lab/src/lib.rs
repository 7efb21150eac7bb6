// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runner on top of `aplab-core`: JSON configs, a thread-pool
//! cell executor, built-in presets and deterministic CSV/JSON reports.

// `!(x > 0.0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod output;
pub mod presets;
pub mod run;

pub use config::ExperimentConfig;
pub use error::{exit, LabError, LabResult};
pub use exec::RayonExecutor;
pub use experiments::{run_experiment, Outcome};
pub use output::{Check, Table};
pub use presets::{preset, PRESETS};
pub use run::{render, run, RunOptions, RunReport, VERSION};
