// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! One-sided Jacobi SVD. Slow compared to bidiagonalization but simple and
//! accurate to high relative precision, which suits the small dense problems
//! here.

use alloc::vec::Vec;

use super::{dot, sqrt, vec_norm, ComplexMatrix, C64, EPS};
use crate::error::{Error, Result};

/// Thin SVD `A = U diag(values) V^dagger`, singular values descending.
/// `u` is `m x k`, `v` is `n x k` with `k = min(m, n)`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// Number of singular values above `tol * sigma_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let top = self.values.first().copied().unwrap_or(0.0);
        self.values.iter().filter(|&&s| s > tol * top).count()
    }
}

pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if a.rows() < a.cols() {
        let Svd { u, values, v } = jacobi(&a.adjoint())?;
        return Ok(Svd { u: v, values, v: u });
    }
    jacobi(a)
}

fn jacobi(a: &ComplexMatrix) -> Result<Svd> {
    a.check_finite()?;
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let max_sweeps = 80;
    // Columns below this norm are zero at working precision; rotating them
    // against each other only shuffles rounding noise and can cycle.
    let negligible = (EPS * a.norm_fro()) * (EPS * a.norm_fro());
    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(w.col(p), w.col(p)).re;
                let beta = dot(w.col(q), w.col(q)).re;
                let gamma = dot(w.col(p), w.col(q));
                let g = gamma.norm();
                if g == 0.0 || g <= EPS * m as f64 * sqrt(alpha * beta) || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut w, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { what: "Jacobi SVD", iterations: max_sweeps });
    }

    let norms: Vec<f64> = (0..n).map(|j| vec_norm(w.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = ComplexMatrix::zeros(m, n);
    let mut values = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        values.push(s);
        if s > 0.0 {
            let col: Vec<C64> = w.col(j).iter().map(|x| x / s).collect();
            u.set_col(k, &col);
        }
    }
    complete_orthonormal(&mut u, &values);
    Ok(Svd { u, values, v: v.select_cols(&order) })
}

/// Columns `q <- q e^{-i phi}`, then the real rotation
/// `(p, q) <- (c p - s q, s p + c q)`.
fn rotate(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let rows = m.rows();
    let ph = phase.conj();
    for i in 0..rows {
        let xp = m[(i, p)];
        let xq = m[(i, q)] * ph;
        m[(i, p)] = xp * c - xq * s;
        m[(i, q)] = xp * s + xq * c;
    }
}

/// Replace columns belonging to (numerically) zero singular values with an
/// orthonormal completion, so that `u` has orthonormal columns throughout.
fn complete_orthonormal(u: &mut ComplexMatrix, values: &[f64]) {
    let top = values.first().copied().unwrap_or(0.0);
    let (m, n) = u.shape();
    let mut next_basis = 0;
    for k in 0..n {
        if values[k] > top * EPS * 16.0 && values[k] > 0.0 {
            continue;
        }
        // Gram-Schmidt a standard basis vector against the columns so far.
        while next_basis < m {
            let mut e = alloc::vec![C64::new(0.0, 0.0); m];
            e[next_basis] = C64::new(1.0, 0.0);
            next_basis += 1;
            for _ in 0..2 {
                for j in 0..n {
                    if j == k || (j > k && values[j] <= top * EPS * 16.0) {
                        continue;
                    }
                    let proj = dot(u.col(j), &e);
                    for (x, y) in e.iter_mut().zip(u.col(j)) {
                        *x -= proj * y;
                    }
                }
            }
            let nrm = vec_norm(&e);
            if nrm > 0.5 {
                let col: Vec<C64> = e.iter().map(|x| x / nrm).collect();
                u.set_col(k, &col);
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn reconstruct(s: &Svd) -> ComplexMatrix {
        let mut us = s.u.clone();
        for (j, &x) in s.values.iter().enumerate() {
            for z in us.col_mut(j) {
                *z *= x;
            }
        }
        &us * &s.v.adjoint()
    }

    #[test]
    fn rectangular_both_orientations() {
        let a = ComplexMatrix::from_fn(5, 3, |i, j| c((i + 2 * j) as f64 * 0.3 - 1.0, (i * j) as f64 * 0.1));
        for m in [a.clone(), a.adjoint()] {
            let s = svd(&m).unwrap();
            assert!(reconstruct(&s).approx_eq(&m, 1e-13));
            assert!((&s.u.adjoint() * &s.u).approx_eq(&ComplexMatrix::identity(3), 1e-13));
            assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_deficient_gets_unitary_factors() {
        let x = [c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)];
        let a = ComplexMatrix::outer(&x, &x);
        let s = svd(&a).unwrap();
        assert_eq!(s.rank(1e-12), 1);
        assert!((s.values[0] - 6.0).abs() < 1e-13);
        assert!((&s.u.adjoint() * &s.u).approx_eq(&ComplexMatrix::identity(3), 1e-13));
        assert!(reconstruct(&s).approx_eq(&a, 1e-13));
    }

    #[test]
    fn zero_matrix() {
        let s = svd(&ComplexMatrix::zeros(2, 2)).unwrap();
        assert_eq!(s.values, [0.0, 0.0]);
        assert!((&s.u.adjoint() * &s.u).approx_eq(&ComplexMatrix::identity(2), 1e-15));
    }
}
