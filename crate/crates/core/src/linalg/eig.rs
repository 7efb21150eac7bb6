// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! General eigenproblem through the complex Schur form.

use alloc::vec;
use alloc::vec::Vec;

use super::{svd, vec_norm, ComplexMatrix, Lu, C64, EPS};
use crate::error::{Error, Result};

/// Eigenbasis condition above which the decomposition is flagged as
/// non-diagonalizable within tolerance.
pub const ILL_CONDITIONED: f64 = 1e8;

/// `A = Z T Z^dagger` with `T` upper triangular and `Z` unitary.
#[derive(Clone, Debug)]
pub struct Schur {
    pub t: ComplexMatrix,
    pub z: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    /// Unit-norm right eigenvectors as columns.
    pub right: ComplexMatrix,
    /// Left eigenvectors, scaled so that `left[:, i]^dagger right[:, j] = delta_ij`.
    pub left: ComplexMatrix,
    /// 2-norm condition number of `right`.
    pub condition: f64,
    /// Set when `condition` exceeds [`ILL_CONDITIONED`]; the eigenbasis is then
    /// not trustworthy (defective or nearly defective spectrum).
    pub ill_conditioned: bool,
}

pub fn schur(a: &ComplexMatrix) -> Result<Schur> {
    a.require_square()?;
    let mut h = a.clone();
    let mut z = ComplexMatrix::identity(a.rows());
    hessenberg(&mut h, &mut z);
    qr_iterate(&mut h, &mut z)?;
    Ok(Schur { t: h, z })
}

pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    Ok(schur(a)?.t.diagonal())
}

pub fn eig_general(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = a.require_square()?;
    let Schur { t, z } = schur(a)?;
    let values = t.diagonal();
    let right = &z * &triangular_eigenvectors(&t);
    let mut right = right;
    for j in 0..n {
        let nv = vec_norm(right.col(j));
        for x in right.col_mut(j) {
            *x /= nv;
        }
    }
    let sv = svd(&right)?.values;
    let condition = match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    };
    let ill_conditioned = !(condition <= ILL_CONDITIONED);
    let left = match Lu::new(&right) {
        Ok(lu) if !ill_conditioned => lu.inverse().adjoint(),
        _ => adjoint_eigenvectors(a, &values)?,
    };
    Ok(EigenDecomposition { values, right, left, condition, ill_conditioned })
}

/// Fallback left eigenvectors for a defective spectrum: unit right eigenvectors
/// of `A^dagger`, matched to `conj(lambda)` greedily. Biorthogonality cannot
/// hold here, so no attempt is made to rescale them.
fn adjoint_eigenvectors(a: &ComplexMatrix, values: &[C64]) -> Result<ComplexMatrix> {
    let n = values.len();
    let Schur { t, z } = schur(&a.adjoint())?;
    let w = &z * &triangular_eigenvectors(&t);
    let mu = t.diagonal();
    let mut used = vec![false; n];
    let mut out = ComplexMatrix::zeros(n, n);
    for (i, lam) in values.iter().enumerate() {
        let k = (0..n)
            .filter(|&k| !used[k])
            .min_by(|&p, &q| (mu[p].conj() - lam).norm().total_cmp(&(mu[q].conj() - lam).norm()))
            .unwrap_or(i);
        used[k] = true;
        let nv = vec_norm(w.col(k));
        let col: Vec<C64> = w.col(k).iter().map(|x| x / nv).collect();
        out.set_col(i, &col);
    }
    Ok(out)
}

/// Householder reduction to upper Hessenberg form, accumulating into `q`.
fn hessenberg(a: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        if vec_norm(&x[1..]) == 0.0 {
            continue;
        }
        let xnorm = vec_norm(&x);
        let x0 = x[0];
        let ph = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -ph * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vn = vec_norm(&v);
        for z in v.iter_mut() {
            *z /= vn;
        }
        // Left: rows k+1.. of columns k..n.
        for j in k..n {
            let col = &mut a.col_mut(j)[k + 1..];
            let s: C64 = v.iter().zip(col.iter()).map(|(vi, x)| vi.conj() * x).sum::<C64>() * 2.0;
            for (x, vi) in col.iter_mut().zip(&v) {
                *x -= vi * s;
            }
        }
        // Right: columns k+1.. of every row.
        for mat in [&mut *a, &mut *q] {
            let mut s = vec![C64::new(0.0, 0.0); n];
            for (j, vj) in v.iter().enumerate() {
                for (si, x) in s.iter_mut().zip(mat.col(k + 1 + j)) {
                    *si += x * vj;
                }
            }
            for (j, vj) in v.iter().enumerate() {
                let f = vj.conj() * 2.0;
                for (x, si) in mat.col_mut(k + 1 + j).iter_mut().zip(&s) {
                    *x -= si * f;
                }
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let nrm = super::hypot(ax, ay);
    (ax / nrm, (x / ax) * y.conj() / nrm)
}

/// Single-shift complex QR on a Hessenberg matrix, producing the full Schur form.
fn qr_iterate(h: &mut ComplexMatrix, z: &mut ComplexMatrix) -> Result<()> {
    let n = h.rows();
    if n < 2 {
        return Ok(());
    }
    let norm = h.norm_fro().max(f64::MIN_POSITIVE);
    let max_its = 30 * n.max(10);
    let mut ihi = n - 1;
    let mut its = 0;
    while ihi > 0 {
        // Find the top of the active unreduced block.
        let mut l = ihi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut tst = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if tst == 0.0 {
                tst = norm;
            }
            if sub <= EPS * tst || sub <= f64::MIN_POSITIVE * n as f64 {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == ihi {
            ihi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        if its > max_its {
            return Err(Error::NoConvergence { what: "Schur QR iteration", iterations: its });
        }

        let mu = if its % 10 == 0 {
            // Exceptional shift to break cycles.
            h[(ihi, ihi)] + h[(ihi, ihi - 1)].re.abs() * 0.75
        } else {
            let a = h[(ihi - 1, ihi - 1)];
            let b = h[(ihi - 1, ihi)];
            let c = h[(ihi, ihi - 1)];
            let d = h[(ihi, ihi)];
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = d + half + disc;
            let m2 = d + half - disc;
            if (m1 - d).norm() <= (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };

        for k in l..ihi {
            let (x, y) = if k == l { (h[(l, l)] - mu, h[(l + 1, l)]) } else { (h[(k, k - 1)], h[(k + 1, k - 1)]) };
            let (c, s) = givens(x, y);
            let j0 = if k == l { l } else { k - 1 };
            for j in j0..n {
                let p = h[(k, j)];
                let q = h[(k + 1, j)];
                h[(k, j)] = p * c + s * q;
                h[(k + 1, j)] = -s.conj() * p + q * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
            }
            let i1 = (k + 2).min(ihi);
            for i in 0..=i1 {
                let p = h[(i, k)];
                let q = h[(i, k + 1)];
                h[(i, k)] = p * c + q * s.conj();
                h[(i, k + 1)] = -p * s + q * c;
            }
            for i in 0..n {
                let p = z[(i, k)];
                let q = z[(i, k + 1)];
                z[(i, k)] = p * c + q * s.conj();
                z[(i, k + 1)] = -p * s + q * c;
            }
        }
    }
    // Clear the strictly lower part, which holds only rounding residue.
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(())
}

/// Eigenvectors of an upper triangular matrix by back-substitution.
/// Near-equal diagonal entries are perturbed to a small pivot, as LAPACK does.
fn triangular_eigenvectors(t: &ComplexMatrix) -> ComplexMatrix {
    let n = t.rows();
    let smin = (EPS * t.norm_fro()).max(f64::MIN_POSITIVE * 1e10);
    let mut x = ComplexMatrix::zeros(n, n);
    let mut col = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        col.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
        col[k] = C64::new(1.0, 0.0);
        let lam = t[(k, k)];
        for i in (0..k).rev() {
            let s: C64 = (i + 1..=k).map(|j| t[(i, j)] * col[j]).sum();
            let den = t[(i, i)] - lam;
            // Real division for the perturbed pivot: squaring a tiny smin
            // inside complex division would underflow to 0/0.
            col[i] = if den.norm() < smin { -s / smin } else { -s / den };
            let big = col[i].norm();
            if big > 1e100 {
                for c in col.iter_mut() {
                    *c /= big;
                }
            }
        }
        x.set_col(k, &col);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn sorted_re(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn diagonal_matrix() {
        let a = ComplexMatrix::from_real_diag(&[3.0, -1.0]);
        let e = eig_general(&a).unwrap();
        assert_eq!(e.values, [c(3.0, 0.0), c(-1.0, 0.0)]);
        assert!(e.right.approx_eq(&ComplexMatrix::identity(2), 1e-15));
        assert!(!e.ill_conditioned);
    }

    #[test]
    fn rotation_generator_has_imaginary_pair() {
        let a = ComplexMatrix::from_real(2, 2, &[0., -1., 1., 0.]).unwrap();
        let v = sorted_re(eigenvalues(&a).unwrap());
        let mut im: Vec<f64> = v.iter().map(|z| z.im).collect();
        im.sort_by(f64::total_cmp);
        assert!((im[0] + 1.0).abs() < 1e-14 && (im[1] - 1.0).abs() < 1e-14);
        assert!(v.iter().all(|z| z.re.abs() < 1e-14));
    }

    #[test]
    fn jordan_block_is_flagged() {
        let a = ComplexMatrix::from_real(2, 2, &[0., 1., 0., 0.]).unwrap();
        let e = eig_general(&a).unwrap();
        assert!(e.ill_conditioned);
        assert!(e.values.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn residuals_and_biorthogonality_on_nonnormal_matrix() {
        let n = 7;
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            let (x, y) = (i as f64, j as f64);
            c((1.3 * x + 0.7 * y).cos() + if i == j { x } else { 0.0 }, (x * y * 0.37).sin())
        });
        let e = eig_general(&a).unwrap();
        let scale = a.norm_fro();
        for i in 0..n {
            let v = e.right.col(i);
            let r: Vec<C64> = a.matvec(v).iter().zip(v).map(|(x, y)| x - e.values[i] * y).collect();
            assert!(vec_norm(&r) <= 1e-10 * scale);
            let w = e.left.col(i);
            let wa = a.adjoint().matvec(w);
            let r: Vec<C64> = wa.iter().zip(w).map(|(x, y)| x - e.values[i].conj() * y).collect();
            assert!(vec_norm(&r) <= 1e-10 * scale * vec_norm(w));
        }
        let g = &e.left.adjoint() * &e.right;
        assert!(g.approx_eq(&ComplexMatrix::identity(n), 1e-10));
    }

    #[test]
    fn schur_reconstructs() {
        let n = 9;
        let a = ComplexMatrix::from_fn(n, n, |i, j| c(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + j) % 3) as f64));
        let s = schur(&a).unwrap();
        let back = &(&s.z * &s.t) * &s.z.adjoint();
        assert!(back.approx_eq(&a, 1e-12));
        assert!((&s.z.adjoint() * &s.z).approx_eq(&ComplexMatrix::identity(n), 1e-13));
        assert!(s.t.diagonal().iter().all(|z| z.re.is_finite()));
    }
}
