// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::format;
use alloc::vec::Vec;

use super::{expm, kron, svd, vec_norm, ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::rng;

/// Linear map on `d x d` matrices as a `d^2 x d^2` matrix acting on
/// column-stacked `vec(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.shape() != (dim * dim, dim * dim) {
            return Err(Error::Dimension(format!(
                "superoperator on d = {dim} needs {0}x{0}, got {1}x{2}",
                dim * dim,
                matrix.rows(),
                matrix.cols()
            )));
        }
        matrix.check_finite()?;
        Ok(Self { dim, matrix })
    }

    /// Tabulate a linear map from its action on matrix units.
    pub fn from_map(dim: usize, mut f: impl FnMut(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let dd = dim * dim;
        let mut m = ComplexMatrix::zeros(dd, dd);
        for col in 0..dd {
            let mut e = ComplexMatrix::zeros(dim, dim);
            e[(col % dim, col / dim)] = C64::new(1.0, 0.0);
            let out = f(&e);
            assert_eq!(out.shape(), (dim, dim), "map must preserve the matrix shape");
            m.set_col(col, out.data());
        }
        Self { dim, matrix: m }
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::identity(dim * dim) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::zeros(dim * dim, dim * dim) }
    }

    /// `X -> A X B`.
    pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        let d = a.require_square()?;
        if b.shape() != (d, d) {
            return Err(Error::Dimension(format!("sandwich factors {d}x{d} and {:?}", b.shape())));
        }
        Ok(Self { dim: d, matrix: kron(&b.transpose(), a) })
    }

    /// `X -> A X`.
    pub fn left(a: &ComplexMatrix) -> Result<Self> {
        let d = a.require_square()?;
        Self::sandwich(a, &ComplexMatrix::identity(d))
    }

    /// `X -> X B`.
    pub fn right(b: &ComplexMatrix) -> Result<Self> {
        let d = b.require_square()?;
        Self::sandwich(&ComplexMatrix::identity(d), b)
    }

    /// `X -> sum_k K_k X K_k^dagger`.
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let d = kraus.first().map(|k| k.rows()).unwrap_or(0);
        let mut out = Self::zero(d);
        for k in kraus {
            out.matrix += &Self::sandwich(k, &k.adjoint())?.matrix;
        }
        Ok(out)
    }

    /// Inverse of [`Superoperator::choi`].
    pub fn from_choi(dim: usize, j: &ComplexMatrix) -> Result<Self> {
        let dd = dim * dim;
        if j.shape() != (dd, dd) {
            return Err(Error::Dimension(format!("Choi matrix for d = {dim} must be {dd}x{dd}")));
        }
        let m = ComplexMatrix::from_fn(dd, dd, |r, c| {
            let (a, cc) = (r % dim, r / dim);
            let (i, jj) = (c % dim, c / dim);
            j[(a * dim + i, cc * dim + jj)]
        });
        Self::from_matrix(dim, m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.shape(), (self.dim, self.dim), "operand dimension mismatch");
        let v = self.matrix.matvec(x.data());
        ComplexMatrix::unvec(&v, self.dim, self.dim).expect("shape is consistent")
    }

    /// `self o other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "composition dimension mismatch");
        Self { dim: self.dim, matrix: &self.matrix * &other.matrix }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { dim: self.dim, matrix: &self.matrix + &other.matrix }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { dim: self.dim, matrix: &self.matrix - &other.matrix }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, matrix: self.matrix.scale_re(s) }
    }

    /// `self o other - other o self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    /// Hilbert-Schmidt adjoint map.
    pub fn adjoint(&self) -> Self {
        Self { dim: self.dim, matrix: self.matrix.adjoint() }
    }

    pub fn exp(&self, t: f64) -> Result<Self> {
        Ok(Self { dim: self.dim, matrix: expm(&self.matrix, t)? })
    }

    pub fn pow(&self, n: u64) -> Self {
        Self { dim: self.dim, matrix: self.matrix.pow(n) }
    }

    pub fn norm_fro(&self) -> f64 {
        self.matrix.norm_fro()
    }

    /// `J = sum_ij Phi(E_ij) (x) E_ij`, output factor first.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        ComplexMatrix::from_fn(d * d, d * d, |r, c| {
            let (a, i) = (r / d, r % d);
            let (cc, j) = (c / d, c % d);
            self.matrix[(a + cc * d, i + j * d)]
        })
    }

    /// `Phi (x) id_n` on the `d n`-dimensional space, system factor first.
    pub fn tensor_identity(&self, n: usize) -> Self {
        let d = self.dim;
        let big = d * n;
        let bb = big * big;
        let mut m = ComplexMatrix::zeros(bb, bb);
        for b in 0..d {
            for a in 0..d {
                let col_phi = a + b * d;
                for beta in 0..n {
                    for alpha in 0..n {
                        let col = (a * n + alpha) + (b * n + beta) * big;
                        for y in 0..d {
                            for x in 0..d {
                                let v = self.matrix[(x + y * d, col_phi)];
                                if v != C64::new(0.0, 0.0) {
                                    m[((x * n + alpha) + (y * n + beta) * big, col)] = v;
                                }
                            }
                        }
                    }
                }
            }
        }
        Self { dim: big, matrix: m }
    }

    /// `|| vec(I)^dagger S ||`, zero for trace-preserving maps.
    pub fn trace_preservation_residual(&self) -> f64 {
        let d = self.dim;
        let row: Vec<C64> = (0..d * d).map(|c| (0..d).map(|i| self.matrix[(i + i * d, c)]).sum()).collect();
        vec_norm(&row)
    }

    /// Deviation of the Choi matrix from Hermiticity, relative to its size.
    pub fn hermiticity_defect(&self) -> f64 {
        let j = self.choi();
        j.hermitian_deviation() / j.norm_fro().max(f64::MIN_POSITIVE)
    }
}

/// Result of the rank-one ascent for the induced trace norm.
#[derive(Clone, Debug)]
pub struct InducedNorm {
    /// Attained by the returned input, so a certified lower bound.
    pub value: f64,
    /// The best start reached a stationary point.
    pub converged: bool,
    /// Maximizing input is `x y^dagger`.
    pub x: Vec<C64>,
    pub y: Vec<C64>,
}

pub const INDUCED_STARTS: usize = 6;
pub const INDUCED_SEED: u64 = 0x1d_5eed;

/// `sup ||Phi(X)||_1` over `||X||_1 <= 1`, with default starts and seed.
pub fn induced_trace_norm(s: &Superoperator) -> InducedNorm {
    induced_trace_norm_with(s, INDUCED_STARTS, INDUCED_SEED)
}

/// The supremum is attained on rank-one `x y^dagger` (extreme points of the
/// trace-norm ball). Each start alternates between the polar factor `U` of
/// `Phi(x y^dagger)` and the top singular pair of `Phi^dagger(U)`, which never
/// decreases the objective.
pub fn induced_trace_norm_with(s: &Superoperator, starts: usize, seed: u64) -> InducedNorm {
    let d = s.dim();
    let adj = s.adjoint();
    let mut best = InducedNorm { value: 0.0, converged: true, x: Vec::new(), y: Vec::new() };
    if d == 0 || s.norm_fro() == 0.0 {
        return best;
    }
    for start in 0..starts.max(1) {
        let (mut x, mut y) = if start == 0 {
            let u = C64::new(1.0 / libm::sqrt(d as f64), 0.0);
            (alloc::vec![u; d], alloc::vec![u; d])
        } else {
            let mut r = rng::stream(seed, start as u64);
            (rng::unit_vector(&mut r, d), rng::unit_vector(&mut r, d))
        };
        let mut value = 0.0;
        let mut converged = false;
        for _ in 0..1000 {
            let out = s.apply(&ComplexMatrix::outer(&x, &y));
            let Ok(dec) = svd(&out) else { break };
            let now: f64 = dec.values.iter().sum();
            let done = now - value <= 1e-14 * now.max(1e-300);
            value = value.max(now);
            if done {
                converged = true;
                break;
            }
            let polar = &dec.u * &dec.v.adjoint();
            let b = adj.apply(&polar);
            let Ok(top) = svd(&b) else { break };
            x = top.u.col(0).to_vec();
            y = top.v.col(0).to_vec();
        }
        if value > best.value {
            best = InducedNorm { value, converged, x, y };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn rand_mat(seed: u64, d: usize) -> ComplexMatrix {
        rng::ginibre(&mut rng::stream(seed, 0), d, d)
    }

    #[test]
    fn sandwich_convention() {
        let (a, x, b) = (rand_mat(1, 3), rand_mat(2, 3), rand_mat(3, 3));
        let s = Superoperator::sandwich(&a, &b).unwrap();
        assert!(s.apply(&x).approx_eq(&(&(&a * &x) * &b), 1e-13));
    }

    #[test]
    fn choi_round_trip_and_identity() {
        let id = Superoperator::identity(2);
        let j = id.choi();
        // sum_ij |ii><jj|
        let mut want = ComplexMatrix::zeros(4, 4);
        for (r, cc) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            want[(r, cc)] = c(1.0, 0.0);
        }
        assert_eq!(j, want);
        let s = Superoperator::from_matrix(3, rand_mat(4, 9)).unwrap();
        assert_eq!(Superoperator::from_choi(3, &s.choi()).unwrap(), s);
    }

    #[test]
    fn tensor_identity_acts_on_products() {
        let s = Superoperator::sandwich(&rand_mat(5, 2), &rand_mat(6, 2)).unwrap();
        let big = s.tensor_identity(3);
        let (x, y) = (rand_mat(7, 2), rand_mat(8, 3));
        let lhs = big.apply(&kron(&x, &y));
        assert!(lhs.approx_eq(&kron(&s.apply(&x), &y), 1e-13));
    }

    #[test]
    fn induced_norm_simple_cases() {
        let id = Superoperator::identity(3);
        assert!((induced_trace_norm(&id).value - 1.0).abs() < 1e-12);
        assert!((induced_trace_norm(&id.scale(0.5)).value - 0.5).abs() < 1e-12);
        assert_eq!(induced_trace_norm(&Superoperator::zero(2)).value, 0.0);
        let ch = rng::channel(&mut rng::stream(9, 0), 3, 2);
        let n = induced_trace_norm(&ch);
        assert!((n.value - 1.0).abs() < 1e-9 && n.converged);
    }

    #[test]
    fn shape_is_validated() {
        assert!(Superoperator::from_matrix(2, ComplexMatrix::zeros(3, 3)).is_err());
    }
}
