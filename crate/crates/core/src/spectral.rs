// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Spectral structure of a generator: kernel, gap, spectral projection,
//! Drazin inverse and relaxation diagnostics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fit;
use crate::linalg::{eig_general, eigh, induced_trace_norm, svd, ComplexMatrix, Lu, Superoperator, C64};
use crate::lindblad::LindbladGenerator;
use crate::metrics::{self, DistanceNorm};
use crate::quadrature::{integrate, QuadOptions};

/// Everything downstream code needs to know about one generator's spectrum.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub generator: Superoperator,
    pub eigenvalues: Vec<C64>,
    /// A steady state: the kernel element when it is unique, otherwise
    /// `P(I / d)`.
    pub steady_state: ComplexMatrix,
    /// `min |Re lambda|` over non-kernel eigenvalues; `None` when the kernel
    /// is everything.
    pub gap: Option<f64>,
    pub projection: Superoperator,
    pub drazin: Superoperator,
    pub kernel_dim: usize,
    /// Unique, full-rank steady state.
    pub primitive: bool,
    /// Condition number of the eigenvector matrix.
    pub eigen_condition: f64,
    /// Eigenbasis too ill-conditioned to trust (defective within tolerance).
    pub ill_conditioned: bool,
    pub tol_zero: f64,
    /// `max |P - |rho><I||` when the kernel is one-dimensional.
    pub projection_crosscheck: Option<f64>,
    /// `||L R||_F` for the computed right kernel basis `R`.
    pub kernel_residual: f64,
}

impl SpectralData {
    /// Gap, or an error when there is none.
    pub fn require_gap(&self) -> Result<f64> {
        match self.gap {
            Some(g) if g > self.tol_zero => Ok(g),
            _ => Err(Error::NoGap),
        }
    }

    /// `I - P`.
    pub fn complement(&self) -> Superoperator {
        Superoperator::identity(self.generator.dim()).sub(&self.projection)
    }
}

pub fn analyze(g: &LindbladGenerator) -> Result<SpectralData> {
    analyze_superoperator(g.superoperator())
}

/// Spectral analysis of any generator given as a superoperator.
pub fn analyze_superoperator(l: &Superoperator) -> Result<SpectralData> {
    let d = l.dim();
    let dd = d * d;
    let lm = l.matrix();
    let norm = lm.norm_one();
    let tol_zero = 1e-10f64.max(1e-12 * norm);

    let eig = eig_general(lm)?;
    let kernel_dim = eig.values.iter().filter(|z| z.norm() < tol_zero).count();
    if kernel_dim == 0 {
        return Err(Error::EmptyKernel);
    }
    let gap = eig
        .values
        .iter()
        .filter(|z| z.norm() >= tol_zero)
        .map(|z| z.re.abs())
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))));

    // Kernel bases from the smallest singular vectors of L and L^dagger.
    let tail: Vec<usize> = (dd - kernel_dim..dd).collect();
    let right = svd(lm)?.v.select_cols(&tail);
    let left = svd(&lm.adjoint())?.v.select_cols(&tail);
    let kernel_residual = (lm * &right).norm_fro();
    let overlap = &left.adjoint() * &right;
    let coupling = Lu::new(&overlap).map_err(|_| {
        Error::IllConditioned(alloc::format!("left and right kernels of dimension {kernel_dim} are orthogonal"))
    })?;
    let projection_m = &right * &coupling.solve(&left.adjoint());
    let projection = Superoperator::from_matrix(d, projection_m)?;

    let shifted = lm + projection.matrix();
    let drazin_m = &Lu::new(&shifted)?.inverse() - projection.matrix();
    let drazin = Superoperator::from_matrix(d, drazin_m)?;

    let steady_state = {
        let raw = if kernel_dim == 1 {
            ComplexMatrix::unvec(right.col(0), d, d)?
        } else {
            projection.apply(&ComplexMatrix::identity(d).scale_re(1.0 / d as f64))
        };
        let tr = raw.trace();
        let rho = if tr.norm() > 1e-12 * raw.norm_fro() {
            raw.scale(C64::new(1.0, 0.0) / tr)
        } else {
            projection.apply(&ComplexMatrix::identity(d).scale_re(1.0 / d as f64))
        };
        rho.hermitian_part()
    };
    let min_steady = eigh(&steady_state)?.min();
    let primitive = kernel_dim == 1 && min_steady > 1e-12;

    let projection_crosscheck = (kernel_dim == 1).then(|| {
        let trace_form = ComplexMatrix::outer(steady_state.data(), ComplexMatrix::identity(d).data());
        projection.matrix().max_abs_diff(&trace_form)
    });

    Ok(SpectralData {
        generator: l.clone(),
        eigenvalues: eig.values,
        steady_state,
        gap,
        projection,
        drazin,
        kernel_dim,
        primitive,
        eigen_condition: eig.condition,
        ill_conditioned: eig.ill_conditioned,
        tol_zero,
        projection_crosscheck,
        kernel_residual,
    })
}

/// Cross-checks of the Drazin inverse against its integral representation.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DrazinReport {
    /// `||L+_quad - L+||_F / ||L+||_F` with the integral cut at `40 / gap`.
    pub quadrature_rel_error: f64,
    pub quadrature_error_estimate: f64,
    pub evaluations: usize,
    /// Induced trace norm of `L+`.
    pub drazin_norm: f64,
    /// `||L+|| * gap`; at most 1 when `L` is normal.
    pub gap_ratio: f64,
    /// `||L+ (rho)||_1` for the steady state.
    pub steady_annihilation: f64,
    /// `max(||L+ L - (I - P)||, ||L L+ - (I - P)||)`, entrywise.
    pub identity_residual: f64,
}

/// `L+ = -int_0^inf e^{tL}(I - P) dt`, evaluated by adaptive quadrature.
pub fn drazin_check(sd: &SpectralData) -> Result<DrazinReport> {
    let gap = sd.require_gap()?;
    let l = sd.generator.matrix();
    let q = sd.complement();
    let t_cut = 40.0 / gap;
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-9, max_intervals: 2000, grading: 0 };
    let quad = integrate(|t| Ok(&crate::linalg::expm(l, t)? * q.matrix()), 0.0, t_cut, opts)?;
    let integral = -&quad.value;
    let dz = sd.drazin.matrix();
    let quadrature_rel_error = (&integral - dz).norm_fro() / dz.norm_fro().max(f64::MIN_POSITIVE);
    let drazin_norm = induced_trace_norm(&sd.drazin).value;
    let steady_annihilation = crate::linalg::trace_norm(&sd.drazin.apply(&sd.steady_state))?;
    let identity_residual = (dz * l).max_abs_diff(q.matrix()).max((l * dz).max_abs_diff(q.matrix()));
    Ok(DrazinReport {
        quadrature_rel_error,
        quadrature_error_estimate: quad.error,
        evaluations: quad.evaluations,
        drazin_norm,
        gap_ratio: drazin_norm * gap,
        steady_annihilation,
        identity_residual,
    })
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrimitivityReport {
    /// Strict verdict: unique, full-rank steady state and full-rank outputs.
    pub primitive: bool,
    /// Weaker operative condition: one-dimensional kernel with a gap.
    pub gapped_unique: bool,
    pub kernel_dim: usize,
    pub steady_state_min_eigenvalue: f64,
    /// Smallest eigenvalue over `exp(t0 L)` applied to `d^2` probe states.
    pub min_output_eigenvalue: f64,
    pub t0: f64,
}

/// `d^2` pure probe states spanning the operator space.
fn probe_states(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let s = core::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        let mut v = alloc::vec![C64::new(0.0, 0.0); d];
        v[i] = C64::new(1.0, 0.0);
        out.push(ComplexMatrix::outer(&v, &v));
    }
    for i in 0..d {
        for j in i + 1..d {
            for phase in [C64::new(s, 0.0), C64::new(0.0, s)] {
                let mut v = alloc::vec![C64::new(0.0, 0.0); d];
                v[i] = C64::new(s, 0.0);
                v[j] = phase;
                out.push(ComplexMatrix::outer(&v, &v));
            }
        }
    }
    out
}

pub fn primitivity_test(g: &LindbladGenerator) -> Result<PrimitivityReport> {
    let sd = analyze(g)?;
    primitivity_from(&sd)
}

pub fn primitivity_from(sd: &SpectralData) -> Result<PrimitivityReport> {
    let gap = sd.gap.filter(|&x| x > sd.tol_zero);
    let t0 = gap.map_or(10.0, |g| 10.0 / g);
    let channel = sd.generator.exp(t0)?;
    let mut min_output = f64::INFINITY;
    for rho in probe_states(sd.generator.dim()) {
        min_output = min_output.min(eigh(&channel.apply(&rho))?.min());
    }
    let steady_min = eigh(&sd.steady_state)?.min();
    let gapped_unique = sd.kernel_dim == 1 && gap.is_some();
    Ok(PrimitivityReport {
        primitive: sd.kernel_dim == 1 && steady_min > 1e-12 && min_output > 1e-12,
        gapped_unique,
        kernel_dim: sd.kernel_dim,
        steady_state_min_eigenvalue: steady_min,
        min_output_eigenvalue: min_output,
        t0,
    })
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    pub rate: f64,
    pub prefactor: f64,
    pub gap: f64,
    /// `(t, ||exp(tL) - P||)` on the grid `t = k / gap`, `k = 1..20`.
    pub samples: Vec<(f64, f64)>,
    /// Samples that entered the fit (the rest were below the noise floor).
    pub used: usize,
}

/// Samples below this are rounding noise and excluded from decay fits.
pub const DECAY_FLOOR: f64 = 1e-13;

pub fn decay_rate_fit(g: &LindbladGenerator, norm: DistanceNorm) -> Result<DecayFit> {
    decay_rate_fit_from(&analyze(g)?, norm)
}

/// Fit `||exp(tL) - P|| ~ C exp(-rate t)`.
pub fn decay_rate_fit_from(sd: &SpectralData, norm: DistanceNorm) -> Result<DecayFit> {
    let gap = sd.require_gap()?;
    let mut samples = Vec::with_capacity(20);
    for k in 1..=20 {
        let t = k as f64 / gap;
        let diff = sd.generator.exp(t)?.sub(&sd.projection);
        let v = metrics::distance(norm, &diff)?;
        samples.push((t, v));
    }
    let ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (rate, prefactor, f) = fit::exponential_decay(&ts, &ys, DECAY_FLOOR)?;
    Ok(DecayFit { rate, prefactor, gap, samples, used: f.points })
}

/// Largest `K` with `||(z - L)^{-1}(I - P)|| = K / (gap - |z|)` over real
/// samples `z` in `(-gap/2, gap/2)`.
pub fn resolvent_constant(sd: &SpectralData, samples: &[f64]) -> Result<f64> {
    let gap = sd.require_gap()?;
    let d = sd.generator.dim();
    let q = sd.complement();
    let mut worst: f64 = 0.0;
    for &frac in samples {
        let z = frac * gap;
        // On ran Q the shifted operator is z - L; on ran P it is the identity.
        let zl = &ComplexMatrix::identity(d * d).scale_re(z) - sd.generator.matrix();
        let m = &(&zl * q.matrix()) + sd.projection.matrix();
        let r = &Lu::new(&m)?.inverse() * q.matrix();
        let n = induced_trace_norm(&Superoperator::from_matrix(d, r)?).value;
        worst = worst.max(n * (gap - z.abs()));
    }
    Ok(worst)
}

/// `(1/T) int_0^T exp(tL) dt`, which tends to `P`.
pub fn ergodic_average(sd: &SpectralData, horizon: f64) -> Result<Superoperator> {
    let l = sd.generator.matrix();
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000, grading: 0 };
    let q = integrate(|t| crate::linalg::expm(l, t), 0.0, horizon, opts)?;
    Superoperator::from_matrix(sd.generator.dim(), q.value.scale_re(1.0 / horizon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::ops;

    fn damping(kappa: f64, levels: usize) -> LindbladGenerator {
        let a = ops::annihilation(levels).scale_re(libm::sqrt(kappa));
        LindbladGenerator::new(ComplexMatrix::zeros(levels, levels), alloc::vec![a]).unwrap()
    }

    fn depolarizing(gamma: f64, d: usize) -> LindbladGenerator {
        // gamma (I/d tr X - X) = (gamma/d) sum_ij D[E_ij].
        let s = libm::sqrt(gamma / d as f64);
        let jumps = (0..d * d).map(|k| ops::unit(d, k % d, k / d).scale_re(s)).collect();
        LindbladGenerator::new(ComplexMatrix::zeros(d, d), jumps).unwrap()
    }

    #[test]
    fn damping_structure() {
        let kappa = 2.0;
        let sd = analyze(&damping(kappa, 4)).unwrap();
        assert_eq!(sd.kernel_dim, 1);
        assert!(sd.steady_state.approx_eq(&ops::unit(4, 0, 0), 1e-12));
        // Coherences |0><1| relax at kappa/2, the slowest rate.
        assert!((sd.gap.unwrap() - kappa / 2.0).abs() < 1e-10);
        assert!(sd.projection_crosscheck.unwrap() < 1e-10);
        assert!(!sd.primitive);
    }

    #[test]
    fn zero_generator_has_no_gap() {
        let sd = analyze(&LindbladGenerator::zero(2)).unwrap();
        assert_eq!(sd.kernel_dim, 4);
        assert!(sd.gap.is_none());
        assert_eq!(sd.require_gap().unwrap_err(), Error::NoGap);
    }

    #[test]
    fn depolarizing_is_primitive() {
        let r = primitivity_test(&depolarizing(0.7, 3)).unwrap();
        assert!(r.primitive && r.gapped_unique);
        let sd = analyze(&depolarizing(0.7, 3)).unwrap();
        assert!(sd.steady_state.approx_eq(&ComplexMatrix::identity(3).scale_re(1.0 / 3.0), 1e-12));
    }

    #[test]
    fn two_blocks_are_not_primitive() {
        // Damping inside {0,1} and inside {2,3} separately.
        let mut l1 = ComplexMatrix::zeros(4, 4);
        l1[(0, 1)] = C64::new(1.0, 0.0);
        let mut l2 = ComplexMatrix::zeros(4, 4);
        l2[(2, 3)] = C64::new(1.0, 0.0);
        let g = LindbladGenerator::new(ComplexMatrix::zeros(4, 4), alloc::vec![l1, l2]).unwrap();
        let r = primitivity_test(&g).unwrap();
        assert!(r.kernel_dim >= 2 && !r.primitive);
    }

    #[test]
    fn drazin_two_level() {
        let kappa = 3.0;
        let sd = analyze(&damping(kappa, 2)).unwrap();
        // Population of |1> decays at kappa: L+ maps E_11 - E_00 to -(E_11 - E_00)/kappa.
        let x = ComplexMatrix::from_real_diag(&[-1.0, 1.0]);
        assert!(sd.drazin.apply(&x).approx_eq(&x.scale_re(-1.0 / kappa), 1e-12));
        let r = drazin_check(&sd).unwrap();
        assert!(r.quadrature_rel_error < 1e-6, "{r:?}");
        assert!(r.steady_annihilation < 1e-10 && r.identity_residual < 1e-9);
        // Damping is not normal, so ||L+|| exceeds 1/gap here.
        assert!(r.gap_ratio >= 1.0 - 1e-8, "{r:?}");
    }
}
