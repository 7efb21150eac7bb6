// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

use super::{eigh, svd, ComplexMatrix};
use crate::error::Result;

/// Sum of singular values. Hermitian inputs go through the (faster)
/// Hermitian eigensolver.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    m.require_square()?;
    if m.hermitian_deviation() <= 1e-14 * m.norm_fro() {
        return Ok(eigh(m)?.values.iter().map(|x| x.abs()).sum());
    }
    Ok(svd(m)?.values.iter().sum())
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m)?.values.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn identity_and_states() {
        assert!((trace_norm(&ComplexMatrix::identity(5)).unwrap() - 5.0).abs() < 1e-14);
        let psi = [c(0.6, 0.0), c(0.0, 0.8)];
        let rho = ComplexMatrix::outer(&psi, &psi);
        assert!((trace_norm(&rho).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sx_minus_sz() {
        // X - Z = [[-1, 1], [1, 1]] has eigenvalues +-sqrt(2).
        let m = ComplexMatrix::from_real(2, 2, &[-1., 1., 1., 1.]).unwrap();
        assert!((trace_norm(&m).unwrap() - 2.0 * core::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_goes_through_svd() {
        let m = ComplexMatrix::from_real(2, 2, &[0., 2., 0., 0.]).unwrap();
        assert!((trace_norm(&m).unwrap() - 2.0).abs() < 1e-15);
        assert!((operator_norm(&m).unwrap() - 2.0).abs() < 1e-15);
        assert!(trace_norm(&ComplexMatrix::zeros(2, 1)).is_err());
    }
}
