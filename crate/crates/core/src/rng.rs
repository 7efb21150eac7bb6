// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random objects.
//!
//! Every generator is a ChaCha8 stream addressed by `(seed, stream)`. ChaCha is
//! counter based, so stream `k` of a seed yields the same numbers no matter how
//! many other streams were consumed first or on which thread. Multi-start
//! optimizers use one stream per start.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vec_norm, ComplexMatrix, Superoperator, C64};
use crate::lindblad::LindbladGenerator;

pub type StreamRng = ChaCha8Rng;

/// Generator for stream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Gaussian with unit variance per complex entry.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    C64::new(gaussian(rng) * s, gaussian(rng) * s)
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random unit vector.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let nv = vec_norm(&v);
        if nv > 1e-12 {
            return v.into_iter().map(|x| x / nv).collect();
        }
    }
}

/// Matrix with orthonormal columns from Gram-Schmidt on a Ginibre matrix;
/// Haar-distributed for square shapes.
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    let mut q = ginibre(rng, rows, cols);
    for j in 0..cols {
        for _ in 0..2 {
            for k in 0..j {
                let proj: C64 = q.col(k).iter().zip(q.col(j)).map(|(a, b)| a.conj() * b).sum();
                let qk: Vec<C64> = q.col(k).to_vec();
                for (x, y) in q.col_mut(j).iter_mut().zip(&qk) {
                    *x -= proj * y;
                }
            }
        }
        let nv = vec_norm(q.col(j));
        for x in q.col_mut(j) {
            *x /= nv;
        }
    }
    q
}

pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    isometry(rng, d, d)
}

/// Hermitian matrix with Gaussian entries, scaled by `scale`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize, scale: f64) -> ComplexMatrix {
    ginibre(rng, d, d).hermitian_part().scale_re(scale)
}

/// Random density operator (Hilbert-Schmidt measure for `rank = d`).
pub fn density<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, rank.max(1));
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_re(1.0 / tr)
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let v = unit_vector(rng, d);
    ComplexMatrix::outer(&v, &v)
}

/// Random CPTP map with `kraus` Kraus operators, from a random Stinespring
/// isometry.
pub fn channel<R: Rng + ?Sized>(rng: &mut R, d: usize, kraus: usize) -> Superoperator {
    let v = isometry(rng, d * kraus, d);
    let ops: Vec<ComplexMatrix> = (0..kraus).map(|k| v.block(k * d, 0, d, d)).collect();
    Superoperator::from_kraus(&ops).expect("square Kraus operators")
}

/// Random Lindbladian with `jumps` Gaussian jump operators and a random
/// Hamiltonian, both scaled by `scale`.
pub fn lindbladian<R: Rng + ?Sized>(rng: &mut R, d: usize, jumps: usize, scale: f64) -> LindbladGenerator {
    let h = hermitian(rng, d, scale);
    let s = libm::sqrt(scale / d as f64);
    let ls: Vec<ComplexMatrix> = (0..jumps).map(|_| ginibre(rng, d, d).scale_re(s)).collect();
    LindbladGenerator::new(h, ls).expect("random generator is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_of_consumption_order() {
        let mut a = stream(7, 3);
        let first: f64 = gaussian(&mut a);
        let mut other = stream(7, 2);
        for _ in 0..100 {
            gaussian(&mut other);
        }
        let mut b = stream(7, 3);
        assert_eq!(first, gaussian(&mut b));
    }

    #[test]
    fn unitary_is_unitary() {
        let u = unitary(&mut stream(1, 0), 5);
        assert!((&u.adjoint() * &u).approx_eq(&ComplexMatrix::identity(5), 1e-13));
    }

    #[test]
    fn density_is_a_state() {
        let rho = density(&mut stream(2, 0), 4, 4);
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        assert!(rho.is_hermitian(1e-14));
        assert!(crate::linalg::eigvalsh(&rho).unwrap()[0] > 0.0);
    }
}
