// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Hermitian eigendecomposition: Householder reduction to a real tridiagonal
//! matrix followed by implicit QL iterations.

use alloc::vec;
use alloc::vec::Vec;

use super::{hypot, vec_norm, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: ComplexMatrix,
}

impl Eigh {
    /// `V f(diag) V^dagger`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &x) in self.values.iter().enumerate() {
            let fx = f(x);
            for z in scaled.col_mut(j) {
                *z *= fx;
            }
        }
        let mut out = ComplexMatrix::zeros(n, n);
        // scaled * V^dagger without forming the adjoint.
        for j in 0..n {
            for k in 0..n {
                let b = self.vectors[(j, k)].conj();
                if b == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..n {
                    let a = scaled[(i, k)];
                    out[(i, j)] += a * b;
                }
            }
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of the Hermitian part of `a`.
pub fn eigh(a: &ComplexMatrix) -> Result<Eigh> {
    let n = a.require_square()?;
    let mut t = a.hermitian_part();
    let mut q = ComplexMatrix::identity(n);
    tridiagonalize(&mut t, &mut q);

    let mut d: Vec<f64> = (0..n).map(|k| t[(k, k)].re).collect();
    let mut e = vec![0.0; n];
    let mut phase = C64::new(1.0, 0.0);
    for k in 0..n.saturating_sub(1) {
        let off = t[(k + 1, k)];
        let r = off.norm();
        e[k] = r;
        if r > 0.0 {
            phase *= off / r;
        }
        for z in q.col_mut(k + 1) {
            *z *= phase;
        }
    }
    tql2(&mut d, &mut e, &mut q)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    Ok(Eigh { values: order.iter().map(|&i| d[i]).collect(), vectors: q.select_cols(&order) })
}

pub fn eigvalsh(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eigh(a)?.values)
}

/// In-place `A <- Q^dagger A Q` with `Q` accumulated, leaving `A` tridiagonal.
fn tridiagonalize(a: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = a.rows();
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut p = vec![C64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        if vec_norm(&x[1..]) == 0.0 {
            continue;
        }
        let xnorm = vec_norm(&x);
        let x0 = x[0];
        let ph = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -ph * xnorm;
        let v = &mut v[..m];
        v.copy_from_slice(&x);
        v[0] -= alpha;
        let vn = vec_norm(v);
        for z in v.iter_mut() {
            *z /= vn;
        }

        // Trailing block update B <- B - v w^dagger - w v^dagger.
        let p = &mut p[..m];
        for (i, pi) in p.iter_mut().enumerate() {
            *pi = (0..m).map(|j| a[(k + 1 + i, k + 1 + j)] * v[j]).sum::<C64>() * 2.0;
        }
        let kk: C64 = v.iter().zip(p.iter()).map(|(vi, pi)| vi.conj() * pi).sum();
        let w: Vec<C64> = p.iter().zip(v.iter()).map(|(pi, vi)| pi - kk * vi).collect();
        for j in 0..m {
            for i in 0..m {
                a[(k + 1 + i, k + 1 + j)] -= v[i] * w[j].conj() + w[i] * v[j].conj();
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
            a[(k, i)] = C64::new(0.0, 0.0);
        }

        // Q <- Q (I - 2 v v^dagger) on columns k+1..n.
        for i in 0..n {
            let s: C64 = (0..m).map(|j| q[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..m {
                q[(i, k + 1 + j)] -= s * v[j].conj() * 2.0;
            }
        }
    }
}

/// Implicit QL on the symmetric tridiagonal (d, e), rotating the columns of `v`.
/// `e[i]` couples `i` and `i + 1`.
fn tql2(d: &mut [f64], e: &mut [f64], v: &mut ComplexMatrix) -> Result<()> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence { what: "hermitian eigensolver", iterations: iter });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let h = v[(k, i + 1)];
                        let vi = v[(k, i)];
                        v[(k, i + 1)] = vi * s + h * c;
                        v[(k, i)] = vi * c - h * s;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn pauli_y_spectrum() {
        let y = ComplexMatrix::from_row_major(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        let e = eigh(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.map_values(|x| x).approx_eq(&y, 1e-14));
    }

    #[test]
    fn reconstructs_complex_hermitian() {
        let n = 6;
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            let (i, j) = (i as f64, j as f64);
            if i == j {
                c(i * 0.7 - 1.0, 0.0)
            } else {
                c((i + 2.0 * j).sin() + (j + 2.0 * i).sin(), (i - j) * 0.3)
            }
        });
        let e = eigh(&a).unwrap();
        assert!(e.map_values(|x| x).approx_eq(&a.hermitian_part(), 1e-12));
        let vtv = &e.vectors.adjoint() * &e.vectors;
        assert!(vtv.approx_eq(&ComplexMatrix::identity(n), 1e-13));
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn handles_degenerate_and_trivial_sizes() {
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(eigvalsh(&i3).unwrap(), [1.0, 1.0, 1.0]);
        assert!(eigvalsh(&ComplexMatrix::zeros(0, 0)).unwrap().is_empty());
        assert_eq!(eigvalsh(&ComplexMatrix::from_real(1, 1, &[2.5]).unwrap()).unwrap(), [2.5]);
    }
}
