// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Adiabatic elimination of a fast dissipative layer.
//!
//! For `L_eps = L_fast / eps + L_slow` with `P` the spectral projection of
//! `L_fast`, the effective generator on `ran P` is
//! `P L_slow P - eps P L_slow L_fast^+ (I - P) L_slow P`, where `L_fast^+` is
//! the Drazin inverse of the unscaled fast generator. It is validated against
//! the exact Schur complement of `L_eps` onto `ran P`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{induced_trace_norm, kron, ComplexMatrix, Lu, Superoperator, EPS};
use crate::lindblad::{choi_facts, partial_trace_first, LindbladGenerator};
use crate::spectral::{analyze, SpectralData};

/// Declared factorization `H = H_fast (x) H_slow` with the fast steady state.
#[derive(Clone, Debug)]
pub struct TensorSplit {
    pub d_fast: usize,
    pub d_slow: usize,
    pub fast_steady: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct StiffGenerator {
    pub fast: LindbladGenerator,
    pub slow: LindbladGenerator,
    pub epsilon: f64,
    pub spectral_fast: SpectralData,
    pub split: Option<TensorSplit>,
    /// Coupling part of `slow`, when declared; it is the part expected to
    /// average to zero on the fast steady state.
    pub interaction: Option<LindbladGenerator>,
}

impl StiffGenerator {
    pub fn new(fast: LindbladGenerator, slow: LindbladGenerator, epsilon: f64) -> Result<Self> {
        if fast.dim() != slow.dim() {
            return Err(Error::Dimension(format!("fast acts on {}, slow on {}", fast.dim(), slow.dim())));
        }
        let spectral_fast = analyze(&fast)?;
        let sg = Self { fast, slow, epsilon: 1.0, spectral_fast, split: None, interaction: None };
        sg.with_epsilon(epsilon)
    }

    /// Same parts at a different `eps`; the fast spectral data is reused.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { epsilon, ..self.clone() })
    }

    /// Declare the tensor split. The projection must act as
    /// `X -> fast_steady (x) tr_fast X`, checked to `1e-8`.
    pub fn with_split(mut self, d_fast: usize, d_slow: usize, fast_steady: ComplexMatrix) -> Result<Self> {
        let d = self.fast.dim();
        if d_fast * d_slow != d || fast_steady.shape() != (d_fast, d_fast) {
            return Err(Error::Dimension(format!("split {d_fast} x {d_slow} does not fit dimension {d}")));
        }
        let expected = Superoperator::from_map(d, |x| kron(&fast_steady, &partial_trace_first(x, d_fast, d_slow)));
        let dev = expected.matrix().max_abs_diff(self.spectral_fast.projection.matrix());
        if dev > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "declared fast steady state does not reproduce the projection (deviation {dev:e})"
            )));
        }
        self.split = Some(TensorSplit { d_fast, d_slow, fast_steady });
        Ok(self)
    }

    pub fn with_interaction(mut self, interaction: LindbladGenerator) -> Result<Self> {
        if interaction.dim() != self.slow.dim() {
            return Err(Error::Dimension("interaction dimension differs from slow".into()));
        }
        self.interaction = Some(interaction);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.fast.dim()
    }

    /// `L_fast / eps + L_slow` as a generator.
    pub fn full(&self) -> Result<LindbladGenerator> {
        self.fast.scaled(1.0 / self.epsilon)?.plus(&self.slow)
    }

    pub fn full_superoperator(&self) -> Superoperator {
        self.fast.superoperator().scale(1.0 / self.epsilon).add(self.slow.superoperator())
    }

    pub fn projection(&self) -> &Superoperator {
        &self.spectral_fast.projection
    }

    /// `||L_slow||` in the induced trace norm.
    pub fn slow_norm(&self) -> f64 {
        induced_trace_norm(self.slow.superoperator()).value
    }
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CenteringReport {
    /// `P L_slow (I - P) = 0` within `1e-10 ||L_slow||`.
    pub satisfied: bool,
    /// `||P L_slow (I - P)||`.
    pub residual: f64,
    /// `||P L_int P||` for the declared interaction: the zero-mean form.
    pub zero_mean_residual: Option<f64>,
    pub zero_mean_satisfied: Option<bool>,
}

pub fn centering_check(sg: &StiffGenerator) -> CenteringReport {
    let p = sg.projection();
    let q = sg.spectral_fast.complement();
    let ls = sg.slow.superoperator();
    let scale = sg.slow_norm();
    let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let residual = induced_trace_norm(&p.compose(ls).compose(&q)).value;
    let zero_mean_residual =
        sg.interaction.as_ref().map(|li| induced_trace_norm(&p.compose(li.superoperator()).compose(p)).value);
    CenteringReport {
        satisfied: residual <= tol || scale == 0.0,
        residual,
        zero_mean_residual,
        zero_mean_satisfied: zero_mean_residual.map(|r| r <= tol || scale == 0.0),
    }
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CpVerdict {
    pub cptp: bool,
    /// `max(0, -min eigenvalue)` of the normalized Choi matrix, worst over samples.
    pub cp_violation: f64,
    pub trace_defect: f64,
}

#[derive(Clone, Debug)]
pub struct EffectiveGenerator {
    /// `first_order + second_order`, acting on the full space, supported on `ran P`.
    pub superoperator: Superoperator,
    /// Compression onto the slow factor, when a split is declared.
    pub reduced: Option<Superoperator>,
    pub first_order: Superoperator,
    pub second_order: Superoperator,
    pub projection: Superoperator,
    pub epsilon: f64,
    pub centering: CenteringReport,
    pub cptp_verdict: CpVerdict,
}

impl EffectiveGenerator {
    /// `||(I - P) eff|| + ||eff (I - P)||`, entrywise.
    pub fn support_residual(&self) -> f64 {
        let q = Superoperator::identity(self.projection.dim()).sub(&self.projection);
        let a = q.compose(&self.superoperator).matrix().max_abs();
        let b = self.superoperator.compose(&q).matrix().max_abs();
        a.max(b)
    }

    /// `exp(t eff) P`.
    pub fn propagator(&self, t: f64) -> Result<Superoperator> {
        Ok(self.superoperator.exp(t)?.compose(&self.projection))
    }
}

/// Default sample times for the CP check, in units of `1 / ||eff||`.
const CP_SAMPLES: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

pub fn effective_generator(sg: &StiffGenerator) -> Result<EffectiveGenerator> {
    let p = sg.projection();
    let q = sg.spectral_fast.complement();
    let ls = sg.slow.superoperator();
    let first_order = p.compose(ls).compose(p);
    let second_order =
        p.compose(ls).compose(&sg.spectral_fast.drazin).compose(&q).compose(ls).compose(p).scale(-sg.epsilon);
    let superoperator = first_order.add(&second_order);
    let reduced = sg.split.as_ref().map(|s| compress(&superoperator, s));
    let mut eff = EffectiveGenerator {
        superoperator,
        reduced,
        first_order,
        second_order,
        projection: p.clone(),
        epsilon: sg.epsilon,
        centering: centering_check(sg),
        cptp_verdict: CpVerdict { cptp: true, cp_violation: 0.0, trace_defect: 0.0 },
    };
    let scale = eff.superoperator.matrix().norm_one().max(f64::MIN_POSITIVE);
    let ts: Vec<f64> = CP_SAMPLES.iter().map(|k| k / scale).collect();
    eff.cptp_verdict = cptp_second_order_check(&eff, &ts)?;
    Ok(eff)
}

/// `X -> tr_fast[eff(rho_fast (x) X)]` on the slow factor.
/// `X -> tr_fast L(rho_fast (x) X)` on the slow factor.
pub fn compress(eff: &Superoperator, s: &TensorSplit) -> Superoperator {
    Superoperator::from_map(s.d_slow, |x| partial_trace_first(&eff.apply(&kron(&s.fast_steady, x)), s.d_fast, s.d_slow))
}

/// Choi positivity of `exp(t reduced)` (or `exp(t eff) P` without a split)
/// at each sampled `t`.
pub fn cptp_second_order_check(eff: &EffectiveGenerator, t_samples: &[f64]) -> Result<CpVerdict> {
    let mut worst: f64 = 0.0;
    let mut defect: f64 = 0.0;
    for &t in t_samples {
        let channel = match &eff.reduced {
            Some(r) => r.exp(t)?,
            None => eff.propagator(t)?,
        };
        let facts = choi_facts(&channel)?;
        worst = worst.max(-facts.min_eigenvalue);
        defect = defect.max(facts.trace_defect);
    }
    Ok(CpVerdict { cptp: worst <= 1e-8, cp_violation: worst.max(0.0), trace_defect: defect })
}

/// Exact Schur complement of `L_eps` onto `ran P`:
/// `P L_s P - eps P L_s Q [Q (L_f + eps L_s) Q + P]^{-1} Q L_s P`.
pub fn exact_schur_complement(sg: &StiffGenerator) -> Result<Superoperator> {
    let d = sg.dim();
    let p = sg.projection();
    let q = sg.spectral_fast.complement();
    let ls = sg.slow.superoperator();
    let gap = sg.spectral_fast.require_gap()?;
    let slow_norm = ls.matrix().norm_one();
    if sg.epsilon * gap < 1e3 * EPS * slow_norm {
        return Err(Error::IllConditioned(format!(
            "eps * gap = {:e} is below working precision relative to ||L_slow||",
            sg.epsilon * gap
        )));
    }
    let block = q.compose(&sg.fast.superoperator().add(&ls.scale(sg.epsilon))).compose(&q).add(p);
    let lu = Lu::new(block.matrix())?;
    let inner = Superoperator::from_matrix(d, lu.inverse())?;
    let correction = p.compose(ls).compose(&q).compose(&inner).compose(&q).compose(ls).compose(p);
    Ok(p.compose(ls).compose(p).sub(&correction.scale(sg.epsilon)))
}

/// `max ||S_eps P v||_2` over a basis `v` of `ker L_eps`; zero when kernel
/// vectors compress into the kernel of the Schur complement.
pub fn schur_kernel_residual(sg: &StiffGenerator) -> Result<f64> {
    let full = crate::spectral::analyze_superoperator(&sg.full_superoperator())?;
    let s = exact_schur_complement(sg)?;
    let p = sg.projection();
    let mut worst: f64 = 0.0;
    let basis = full.projection.matrix();
    for j in 0..basis.cols() {
        let v = basis.col(j);
        let n = crate::linalg::vec_norm(v);
        if n < 1e-12 {
            continue;
        }
        let pv = p.matrix().matvec(v);
        let r = s.matrix().matvec(&pv);
        worst = worst.max(crate::linalg::vec_norm(&r) / n);
    }
    Ok(worst)
}

/// `||exp(T L_eps) - exp(T eff) P||` in the induced trace norm.
pub fn dynamics_error(sg: &StiffGenerator, eff: &EffectiveGenerator, t: f64) -> Result<f64> {
    let exact = sg.full_superoperator().exp(t)?;
    Ok(induced_trace_norm(&exact.sub(&eff.propagator(t)?)).value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::ops;
    use crate::rng;
    use alloc::vec;

    fn qubit_pair(g: &mut rng::StreamRng) -> StiffGenerator {
        // Fast: strong damping of the first qubit. Slow: random coupling.
        let fast =
            LindbladGenerator::new(ComplexMatrix::zeros(2, 2), vec![ops::sigma_minus()]).unwrap().tensor_right(2);
        let slow = rng::lindbladian(g, 4, 1, 0.5);
        let rho_f = ops::unit(2, 0, 0);
        StiffGenerator::new(fast, slow, 0.01).unwrap().with_split(2, 2, rho_f).unwrap()
    }

    #[test]
    fn zero_slow_gives_zero_effective() {
        let fast = LindbladGenerator::new(ComplexMatrix::zeros(2, 2), vec![ops::sigma_minus()]).unwrap();
        let sg = StiffGenerator::new(fast, LindbladGenerator::zero(2), 0.1).unwrap();
        let eff = effective_generator(&sg).unwrap();
        assert!(eff.superoperator.matrix().max_abs() < 1e-14);
        assert!(eff.centering.satisfied && eff.cptp_verdict.cptp);
    }

    #[test]
    fn support_and_split() {
        let mut g = rng::stream(3, 0);
        let sg = qubit_pair(&mut g);
        let eff = effective_generator(&sg).unwrap();
        assert!(eff.support_residual() < 1e-10);
        assert_eq!(eff.reduced.as_ref().unwrap().dim(), 2);
        // The reduced generator annihilates the trace.
        let r = eff.reduced.unwrap();
        let id = ComplexMatrix::identity(2);
        let dual = r.adjoint().apply(&id);
        assert!(dual.max_abs() < 1e-10);
    }

    #[test]
    fn wrong_split_is_rejected() {
        let mut g = rng::stream(3, 1);
        let sg = qubit_pair(&mut g);
        let r = sg.with_split(2, 2, ops::unit(2, 1, 1));
        assert!(r.is_err());
    }

    #[test]
    fn violating_drive_fails_centering() {
        let fast =
            LindbladGenerator::new(ComplexMatrix::zeros(2, 2), vec![ops::sigma_minus()]).unwrap().tensor_right(2);
        // A drive on the fast factor alone is invisible to tr_fast, so the
        // violation needs a coupling to the slow factor.
        let drive = kron(&ops::pauli_x(), &ops::pauli_x());
        let slow = LindbladGenerator::new(drive, vec![]).unwrap();
        let sg = StiffGenerator::new(fast, slow.clone(), 0.1).unwrap().with_interaction(slow).unwrap();
        let c = centering_check(&sg);
        assert!(!c.satisfied && c.residual > 0.1);
        // It still has zero mean on |g><g|.
        assert!(c.zero_mean_residual.unwrap() < 1e-12);
    }

    #[test]
    fn schur_complement_approaches_expansion() {
        let mut g = rng::stream(11, 0);
        let base = qubit_pair(&mut g);
        let mut errs = vec![];
        for eps in [1e-1, 1e-2, 1e-3] {
            let sg = base.with_epsilon(eps).unwrap();
            let s = exact_schur_complement(&sg).unwrap();
            let eff = effective_generator(&sg).unwrap();
            errs.push(s.sub(&eff.superoperator).matrix().max_abs());
        }
        // Second order: each decade of eps gains two decades.
        assert!(errs[1] < errs[0] * 0.02 && errs[2] < errs[1] * 0.02, "{errs:?}");
        assert!(schur_kernel_residual(&base).unwrap() < 1e-8);
    }

    #[test]
    fn refuses_hopeless_epsilon() {
        let mut g = rng::stream(11, 1);
        let sg = qubit_pair(&mut g).with_epsilon(1e-17).unwrap();
        assert!(matches!(exact_schur_complement(&sg), Err(Error::IllConditioned(_))));
    }
}
