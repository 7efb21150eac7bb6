// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices and the factorizations built on them.

mod eig;
mod eigh;
mod expm;
mod lu;
mod matrix;
mod norms;
mod superop;
mod svd;

pub use eig::{eig_general, eigenvalues, schur, EigenDecomposition, Schur};
pub use eigh::{eigh, eigvalsh, Eigh};
pub use expm::expm;
pub use lu::Lu;
pub use matrix::{commutator, kron, ComplexMatrix, C64};
pub use norms::{operator_norm, trace_norm};
pub use superop::{induced_trace_norm, InducedNorm, Superoperator};
pub use svd::{svd, Svd};

/// Relative tolerance used when a routine needs "zero to working precision".
pub const EPS: f64 = f64::EPSILON;

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn hypot(a: f64, b: f64) -> f64 {
    libm::hypot(a, b)
}

/// Euclidean norm of a complex vector, scaled to avoid overflow.
pub fn vec_norm(v: &[C64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, z| m.max(z.re.abs()).max(z.im.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = v
        .iter()
        .map(|z| {
            let (a, b) = (z.re / scale, z.im / scale);
            a * a + b * b
        })
        .sum();
    scale * sqrt(s)
}

/// `sum conj(a_i) b_i`.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
