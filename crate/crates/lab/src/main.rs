// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aplab::{exit, preset, run, ExperimentConfig, LabError, LabResult, RunOptions, PRESETS};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aplab", version, about = "Stiff open-system experiments: configs in, reports out")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or a built-in preset by name.
    Run {
        config: String,
        /// Exit 4 when any threshold check fails.
        #[arg(long)]
        check: bool,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// List built-in presets.
    Presets {
        /// Also write each preset as `<name>.json` into DIR.
        #[arg(long, value_name = "DIR")]
        write: Option<PathBuf>,
    },
    /// Parse and validate a config without running it.
    Validate { config: String },
}

/// A path when the file exists, otherwise a preset name.
fn load(arg: &str) -> LabResult<ExperimentConfig> {
    let path = Path::new(arg);
    if path.exists() {
        return ExperimentConfig::load(path);
    }
    preset(arg).ok_or_else(|| LabError::Config(format!("{arg} is neither a readable file nor a preset")))
}

fn fail(e: &LabError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets { write } => {
            for p in PRESETS {
                println!("{:<20} {}", p.name, p.description);
            }
            if let Some(dir) = write {
                let files: Vec<aplab::output::Artifact> = PRESETS
                    .iter()
                    .map(|p| (format!("{}.json", p.name), preset(p.name).expect("listed").to_json().into_bytes()))
                    .collect();
                if let Err(e) = aplab::output::write_atomic(&dir, &files) {
                    return fail(&e);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(c) => {
                println!("ok: {} ({}), config hash sha256:{}", c.name, c.experiment.kind(), c.hash());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Run { config, check, out, threads } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let report = match run(&cfg, &RunOptions { out_dir: out, threads }) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            for c in &report.checks {
                println!(
                    "{} {:<36} {:>14.6e}  want {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.target
                );
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            if check && !report.passed() {
                return ExitCode::from(exit::CHECK_FAILED as u8);
            }
            ExitCode::SUCCESS
        }
    }
}
