// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use aplab_core::Error as CoreError;

pub type LabResult<T> = Result<T, LabError>;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const CHECK_FAILED: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl LabError {
    /// Caller mistakes map to 2, numerics that gave up map to 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => exit::VALIDATION,
            Self::Core(e) => match e {
                CoreError::Dimension(_)
                | CoreError::NotSquare { .. }
                | CoreError::NonFinite { .. }
                | CoreError::NotHermitian { .. }
                | CoreError::IncompleteKraus { .. }
                | CoreError::InvalidParameter(_)
                | CoreError::Cfl { .. }
                | CoreError::SizeCap { .. }
                | CoreError::MissingSplit
                | CoreError::Fit(_) => exit::VALIDATION,
                CoreError::Singular
                | CoreError::NoConvergence { .. }
                | CoreError::NotCptp(_)
                | CoreError::NotPsd { .. }
                | CoreError::EmptyKernel
                | CoreError::NoGap
                | CoreError::Quadrature(_)
                | CoreError::IllConditioned(_)
                | CoreError::NegativeDensity { .. } => exit::NUMERICAL,
            },
            Self::Io { .. } | Self::Csv(_) => exit::IO,
        }
    }
}
