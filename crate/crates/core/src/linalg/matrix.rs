// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix, stored column-major so that `data()` is `vec(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i + i * n] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from column-major data, rejecting non-finite entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        let m = Self { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    /// Build from row-major data, rejecting non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: &[C64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        let m = Self::from_fn(rows, cols, |i, j| data[i * cols + j]);
        m.check_finite()?;
        Ok(m)
    }

    /// Row-major real entries; convenient for small literal matrices.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        let z: Vec<C64> = data.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_major(rows, cols, &z)
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in diag.iter().enumerate() {
            m.data[i + i * n] = z;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let z: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&z)
    }

    /// Outer product `x y^dagger`.
    pub fn outer(x: &[C64], y: &[C64]) -> Self {
        Self::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
    }

    /// Column vector.
    pub fn column(v: &[C64]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// Inverse of `vec`: reshape column-stacked data into a `rows x cols` matrix.
    pub fn unvec(v: &[C64], rows: usize, cols: usize) -> Result<Self> {
        Self::from_col_major(rows, cols, v.to_vec())
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            Some(k) => Err(Error::NonFinite { row: k % self.rows.max(1), col: k / self.rows.max(1) }),
            None => Ok(()),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// Column-major entries, i.e. `vec(self)`.
    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn vec(&self) -> Vec<C64> {
        self.data.clone()
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        self.col_mut(j).copy_from_slice(v);
    }

    pub fn row(&self, i: usize) -> Vec<C64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    /// Matrix built from a subset of columns.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for &j in cols {
            data.extend_from_slice(self.col(j));
        }
        Self { rows: self.rows, cols: cols.len(), data }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn norm_fro(&self) -> f64 {
        super::vec_norm(&self.data)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols).map(|j| self.col(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.shape() == other.shape() && self.max_abs_diff(other) <= tol
    }

    /// Frobenius norm of the anti-Hermitian part, relative to nothing.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self - &self.adjoint()).norm_fro()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_deviation() <= rel_tol * self.norm_fro().max(f64::MIN_POSITIVE)
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for (j, &x) in v.iter().enumerate() {
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.col(j)) {
                *o += a * x;
            }
        }
        out
    }

    /// `self * other`, checked.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let (m, n) = (self.rows, other.cols);
        let mut out = Self::zeros(m, n);
        for j in 0..n {
            let oc = &mut out.data[j * m..(j + 1) * m];
            for k in 0..self.cols {
                let b = other.data[k + j * other.rows];
                if b.re == 0.0 && b.im == 0.0 {
                    continue;
                }
                let ac = &self.data[k * m..(k + 1) * m];
                for (o, a) in oc.iter_mut().zip(ac) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Self {
        assert!(self.is_square(), "pow of a non-square matrix");
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `sum conj(a_ij) b_ij`, the Hilbert-Schmidt inner product.
    pub fn inner(&self, other: &Self) -> C64 {
        super::dot(&self.data, &other.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i + j * self.rows]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i + j * self.rows]
    }
}

// Arithmetic operators panic on shape mismatch, like slice indexing does.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

/// Kronecker product; shape `(ra*rb) x (ca*cb)`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for ja in 0..ca {
        for ia in 0..ra {
            let x = a[(ia, ja)];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for jb in 0..cb {
                for ib in 0..rb {
                    out[(ia * rb + ib, ja * cb + jb)] = x * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) - &(b * a)
}

#[cfg(feature = "serde")]
mod serde_impl {
    //! Plain JSON form: `{"rows", "cols", "re": [[..]], "im": [[..]]}`, row-major.
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Plain {
        rows: usize,
        cols: usize,
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    }

    impl Serialize for ComplexMatrix {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
                (0..self.rows).map(|i| (0..self.cols).map(|j| f(&self[(i, j)])).collect()).collect()
            };
            Plain { rows: self.rows, cols: self.cols, re: rows(|z| z.re), im: rows(|z| z.im) }.serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for ComplexMatrix {
        fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            let p = Plain::deserialize(d)?;
            let shape_ok = |m: &Vec<Vec<f64>>| m.len() == p.rows && m.iter().all(|r| r.len() == p.cols);
            if !shape_ok(&p.re) || !shape_ok(&p.im) {
                return Err(de::Error::custom("re/im arrays do not match rows x cols"));
            }
            let data: Vec<C64> = (0..p.rows)
                .flat_map(|i| (0..p.cols).map(move |j| (i, j)))
                .map(|(i, j)| C64::new(p.re[i][j], p.im[i][j]))
                .collect();
            ComplexMatrix::from_row_major(p.rows, p.cols, &data).map_err(de::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.]).unwrap()
    }
    fn sz() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1., 0., 0., -1.]).unwrap()
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let d = ComplexMatrix::from_real_diag(&[1., 2.]);
        assert_eq!(kron(&d, &i2), ComplexMatrix::from_real_diag(&[1., 1., 2., 2.]));
    }

    #[test]
    fn kron_sx_sz_blocks() {
        // Written out by hand: [[0, Z], [Z, 0]].
        let expected =
            ComplexMatrix::from_real(4, 4, &[0., 0., 1., 0., 0., 0., 0., -1., 1., 0., 0., 0., 0., -1., 0., 0.])
                .unwrap();
        assert_eq!(kron(&sx(), &sz()), expected);
    }

    #[test]
    fn rejects_non_finite() {
        let bad = [C64::new(f64::NAN, 0.0)];
        assert!(matches!(ComplexMatrix::from_row_major(1, 1, &bad), Err(Error::NonFinite { .. })));
        assert!(ComplexMatrix::from_row_major(2, 1, &bad).is_err());
    }

    #[test]
    fn vec_is_column_stacking() {
        let m = ComplexMatrix::from_real(2, 2, &[1., 2., 3., 4.]).unwrap();
        let v: Vec<f64> = m.vec().iter().map(|z| z.re).collect();
        assert_eq!(v, [1., 3., 2., 4.]);
        assert_eq!(ComplexMatrix::unvec(&m.vec(), 2, 2).unwrap(), m);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let m = ComplexMatrix::from_real(2, 2, &[1., 1., 0., 1.]).unwrap();
        assert_eq!(m.pow(5), ComplexMatrix::from_real(2, 2, &[1., 5., 0., 1.]).unwrap());
        assert_eq!(m.pow(0), ComplexMatrix::identity(2));
    }

    #[test]
    fn try_mul_checks_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(a.try_mul(&a).is_err());
        assert_eq!(a.try_mul(&a.adjoint()).unwrap().shape(), (2, 2));
    }
}
