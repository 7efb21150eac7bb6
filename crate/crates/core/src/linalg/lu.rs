// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::vec::Vec;

use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let n = a.require_square()?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for k in 0..n {
            let (p, pivot) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= scale * f64::EPSILON * n as f64 || pivot == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = t;
                }
            }
            let inv = C64::new(1.0, 0.0) / lu[(k, k)];
            for i in k + 1..n {
                lu[(i, k)] *= inv;
            }
            for j in k + 1..n {
                let u = lu[(k, j)];
                if u == C64::new(0.0, 0.0) {
                    continue;
                }
                let (left, right) = lu.data_mut().split_at_mut(j * n);
                let lk = &left[k * n + k + 1..(k + 1) * n];
                for (x, l) in right[k + 1..n].iter_mut().zip(lk) {
                    *x -= l * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Solve `A x = b` for one right-hand side.
    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            for i in j + 1..n {
                x[i] -= self.lu[(i, j)] * xj;
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.lu[(j, j)];
            let xj = x[j];
            for i in 0..j {
                x[i] -= self.lu[(i, j)] * xj;
            }
        }
        x
    }

    /// Solve `A X = B`.
    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve_vec(b.col(j));
            out.set_col(j, &x);
        }
        out
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.dim()))
    }

    pub fn det(&self) -> C64 {
        let mut d: C64 = self.lu.diagonal().into_iter().product();
        // Sign of the permutation from its cycle decomposition.
        let mut seen = alloc::vec![false; self.dim()];
        for s in 0..self.dim() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut k = s;
            while !seen[k] {
                seen[k] = true;
                k = self.perm[k];
                len += 1;
            }
            if len % 2 == 0 {
                d = -d;
            }
        }
        d
    }
}

impl ComplexMatrix {
    pub fn inverse(&self) -> Result<ComplexMatrix> {
        Ok(Lu::new(self)?.inverse())
    }

    /// Solve `self * X = b`.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(Lu::new(self)?.solve(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_small_matrix() {
        let a = ComplexMatrix::from_real(2, 2, &[4., 7., 2., 6.]).unwrap();
        let inv = a.inverse().unwrap();
        let expected = ComplexMatrix::from_real(2, 2, &[0.6, -0.7, -0.2, 0.4]).unwrap();
        assert!(inv.approx_eq(&expected, 1e-14));
        assert!((Lu::new(&a).unwrap().det() - C64::new(10.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.]).unwrap();
        let lu = Lu::new(&a).unwrap();
        assert!(lu.inverse().approx_eq(&a, 1e-15));
        assert!((lu.det() + C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let a = ComplexMatrix::from_real(2, 2, &[1., 2., 2., 4.]).unwrap();
        assert_eq!(Lu::new(&a).unwrap_err(), Error::Singular);
    }
}
