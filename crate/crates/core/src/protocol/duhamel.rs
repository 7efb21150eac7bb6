// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Variation-of-constants identities for `L_eps = L0 + L1` with
//! `L0 = L_fast / eps` and `L1 = L_slow`:
//!
//! `e^{t L_eps} = e^{t L0} + int_0^t e^{(t-s) L0} L1 e^{s L_eps} ds`,
//!
//! and its once-iterated (two-term Dyson) form. Integrals are evaluated by
//! adaptive quadrature in `u = t - s`, graded toward `u = 0` where
//! `e^{u L0}` has its boundary layer.

use crate::elimination::StiffGenerator;
use crate::error::{Error, Result};
use crate::linalg::{expm, induced_trace_norm, ComplexMatrix, Superoperator};
use crate::quadrature::{integrate, QuadOptions};

#[derive(Clone, Debug)]
pub struct DuhamelResult {
    pub value: Superoperator,
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn options() -> QuadOptions {
    QuadOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 4000, grading: 40 }
}

/// `terms = 1`: first-order Duhamel with the exact inner propagator.
/// `terms = 2`: two-term Dyson form, the remainder again carrying the exact
/// propagator. Both are identities, so either reproduces `e^{t L_eps}` up to
/// quadrature error.
pub fn duhamel_oracle(sg: &StiffGenerator, t: f64, terms: u32) -> Result<DuhamelResult> {
    let d = sg.dim();
    let l0 = sg.fast.superoperator().scale(1.0 / sg.epsilon).into_matrix();
    let l1 = sg.slow.superoperator().matrix().clone();
    let full = sg.full_superoperator().into_matrix();
    let free = expm(&l0, t)?;
    let (integral, err, evals) = match terms {
        1 => {
            let q = integrate(|u| Ok(&(&expm(&l0, u)? * &l1) * &expm(&full, t - u)?), 0.0, t, options())?;
            (q.value, q.error, q.evaluations)
        }
        2 => {
            // int_0^t e^{u L0} L1 e^{(t-u) L0} du
            //   + int_0^t e^{u L0} L1 [int_0^{t-u} e^{v L0} L1 e^{(t-u-v) L_eps} dv] du
            let mut inner_evals = 0;
            let mut inner_err: f64 = 0.0;
            let q = integrate(
                |u| {
                    let outer = &expm(&l0, u)? * &l1;
                    let rest = t - u;
                    let first = &outer * &expm(&l0, rest)?;
                    if rest <= 0.0 {
                        return Ok(first);
                    }
                    let inner = integrate(
                        |v| Ok(&(&expm(&l0, v)? * &l1) * &expm(&full, rest - v)?),
                        0.0,
                        rest,
                        QuadOptions { grading: 20, ..options() },
                    )?;
                    inner_evals += inner.evaluations;
                    inner_err = inner_err.max(inner.error);
                    Ok(&first + &(&outer * &inner.value))
                },
                0.0,
                t,
                QuadOptions { grading: 20, ..options() },
            )?;
            (q.value, q.error + t * inner_err, q.evaluations + inner_evals)
        }
        _ => return Err(Error::InvalidParameter(alloc::format!("terms must be 1 or 2, got {terms}"))),
    };
    let value: ComplexMatrix = &free + &integral;
    Ok(DuhamelResult { value: Superoperator::from_matrix(d, value)?, error_estimate: err, evaluations: evals })
}

/// Induced norm of the `(I - P)`-routed part of the Duhamel integral,
/// `int_0^t e^{(t-s) L0} (I - P) L1 e^{s L_eps} ds`. It is `O(eps / gap)`.
pub fn interaction_term(sg: &StiffGenerator, t: f64) -> Result<f64> {
    let l0 = sg.fast.superoperator().scale(1.0 / sg.epsilon).into_matrix();
    let q = sg.spectral_fast.complement();
    let routed = q.matrix() * sg.slow.superoperator().matrix();
    let full = sg.full_superoperator().into_matrix();
    let r = integrate(|u| Ok(&(&expm(&l0, u)? * &routed) * &expm(&full, t - u)?), 0.0, t, options())?;
    Ok(induced_trace_norm(&Superoperator::from_matrix(sg.dim(), r.value)?).value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::lindblad::{ops, LindbladGenerator};
    use alloc::vec;

    fn model(eps: f64) -> StiffGenerator {
        let fast =
            LindbladGenerator::new(ComplexMatrix::zeros(2, 2), vec![ops::sigma_minus()]).unwrap().tensor_right(2);
        let h = kron(&ops::pauli_x(), &ops::pauli_x()).scale_re(0.3);
        let slow =
            LindbladGenerator::new(h, vec![kron(&ComplexMatrix::identity(2), &ops::sigma_minus()).scale_re(0.2)])
                .unwrap();
        StiffGenerator::new(fast, slow, eps).unwrap()
    }

    #[test]
    fn reproduces_the_exponential() {
        let sg = model(0.05);
        let exact = sg.full_superoperator().exp(1.0).unwrap();
        for terms in [1, 2] {
            let r = duhamel_oracle(&sg, 1.0, terms).unwrap();
            assert!(r.value.matrix().max_abs_diff(exact.matrix()) < 1e-8, "terms {terms}");
        }
    }

    #[test]
    fn no_slow_part_is_free_evolution() {
        let fast = LindbladGenerator::new(ComplexMatrix::zeros(2, 2), vec![ops::sigma_minus()]).unwrap();
        let sg = StiffGenerator::new(fast, LindbladGenerator::zero(2), 0.1).unwrap();
        let r = duhamel_oracle(&sg, 0.7, 1).unwrap();
        let free = sg.full_superoperator().exp(0.7).unwrap();
        assert!(r.value.matrix().max_abs_diff(free.matrix()) < 1e-14);
    }

    #[test]
    fn routed_term_shrinks_with_eps() {
        let a = interaction_term(&model(1e-2), 1.0).unwrap();
        let b = interaction_term(&model(1e-3), 1.0).unwrap();
        let ratio = a / b;
        assert!(ratio > 7.0 && ratio < 13.0, "{a} {b}");
    }
}
