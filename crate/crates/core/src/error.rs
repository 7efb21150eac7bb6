// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("hamiltonian is not hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("channel failed CPTP verification: {0}")]
    NotCptp(String),
    #[error("matrix is materially non-PSD (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("Kraus set is incomplete (deviation {deviation:e})")]
    IncompleteKraus { deviation: f64 },
    #[error("generator has an empty numerical kernel")]
    EmptyKernel,
    #[error("generator has no spectral gap")]
    NoGap,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("CFL violation: dt = {dt:e} exceeds {limit:e}")]
    Cfl { dt: f64, limit: f64 },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("problem size {size} exceeds cap {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("no tensor split declared")]
    MissingSplit,
    #[error("ill-conditioned problem: {0}")]
    IllConditioned(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("negative density in cell {cell}")]
    NegativeDensity { cell: usize },
}
