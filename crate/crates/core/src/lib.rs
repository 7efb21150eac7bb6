// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense numerics for stiff open quantum systems.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure: values
//! are immutable after construction and every routine is deterministic for a
//! given seed, so results can be shared across threads freely.
//!
//! Vectorization is column-stacking throughout: the map `X -> A X B` is the
//! matrix `kron(B^T, A)` acting on `vec(X)`.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops read closer to the matrix algebra they implement.
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cavity;
pub mod elimination;
pub mod error;
pub mod exec;
pub mod fit;
pub mod kinetic;
pub mod linalg;
pub mod lindblad;
pub mod metrics;
pub mod optimize;
pub mod protocol;
pub mod quadrature;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{kron, ComplexMatrix, Superoperator, C64};
