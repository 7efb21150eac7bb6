// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::format;

use crate::elimination::StiffGenerator;
use crate::error::{Error, Result};
use crate::linalg::Superoperator;
use crate::metrics::{self, DistanceNorm};

/// Order 1: `exp(dt L_f / eps) exp(dt L_s)`. Order 2: the symmetric
/// splitting `exp(dt/2 L_f / eps) exp(dt L_s) exp(dt/2 L_f / eps)`.
pub fn trotter_step(sg: &StiffGenerator, dt: f64, order: u32) -> Result<Superoperator> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let lf = sg.fast.superoperator().scale(1.0 / sg.epsilon);
    let ls = sg.slow.superoperator();
    match order {
        1 => Ok(lf.exp(dt)?.compose(&ls.exp(dt)?)),
        2 => {
            let half = lf.exp(0.5 * dt)?;
            Ok(half.compose(&ls.exp(dt)?).compose(&half))
        }
        _ => Err(Error::InvalidParameter(format!("Trotter order must be 1 or 2, got {order}"))),
    }
}

/// Diamond norm of the unscaled commutator `[L_fast, L_slow]`.
pub fn commutator_diamond(sg: &StiffGenerator) -> Result<f64> {
    metrics::distance(DistanceNorm::Diamond, &sg.fast.superoperator().commutator(sg.slow.superoperator()))
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrotterCertificate {
    pub dt: f64,
    pub epsilon: f64,
    /// `(dt^2 / 2) diamond([L_fast / eps, L_slow])`.
    pub bound: f64,
    /// Diamond distance between the order-1 step and `exp(dt L_eps)`.
    pub measured: f64,
    pub ratio: f64,
    /// `dt ||L_eps||_1`, the smallness parameter of the bound.
    pub dt_norm: f64,
}

pub fn trotter_error_certificate(sg: &StiffGenerator, dt: f64) -> Result<TrotterCertificate> {
    let comm = commutator_diamond(sg)?;
    certificate_from(sg, dt, comm)
}

/// Certificate with a precomputed unscaled commutator norm.
pub fn certificate_from(sg: &StiffGenerator, dt: f64, commutator: f64) -> Result<TrotterCertificate> {
    let bound = 0.5 * dt * dt * commutator / sg.epsilon;
    let full = sg.full_superoperator();
    let diff = trotter_step(sg, dt, 1)?.sub(&full.exp(dt)?);
    let measured = metrics::distance(DistanceNorm::Diamond, &diff)?;
    let ratio = if bound > 0.0 {
        measured / bound
    } else if measured <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(TrotterCertificate { dt, epsilon: sg.epsilon, bound, measured, ratio, dt_norm: dt * full.matrix().norm_one() })
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepCount {
    pub epsilon: f64,
    pub steps: u64,
    pub error: f64,
}

/// Smallest `n` with `||S(T/n)^n - exp(T L_eps)|| <= delta` for the standard
/// Trotter step `S`: doubling to bracket, then bisection. Fails if `max_steps`
/// does not suffice.
pub fn steps_to_tolerance(
    sg: &StiffGenerator,
    total_time: f64,
    delta: f64,
    order: u32,
    norm: DistanceNorm,
    max_steps: u64,
) -> Result<StepCount> {
    let exact = sg.full_superoperator().exp(total_time)?;
    let error = |n: u64| -> Result<f64> {
        let step = trotter_step(sg, total_time / n as f64, order)?;
        metrics::distance(norm, &step.pow(n).sub(&exact))
    };
    let mut hi = 1u64;
    let mut err_hi = error(hi)?;
    while err_hi > delta {
        if hi >= max_steps {
            return Err(Error::NoConvergence { what: "Trotter step count", iterations: hi as usize });
        }
        hi = (hi * 2).min(max_steps);
        err_hi = error(hi)?;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 && lo > 0 {
        let mid = lo + (hi - lo) / 2;
        let e = error(mid)?;
        if e <= delta {
            hi = mid;
            err_hi = e;
        } else {
            lo = mid;
        }
    }
    Ok(StepCount { epsilon: sg.epsilon, steps: hi, error: err_hi })
}

/// `T^2 diamond([L_f, L_s]) / (2 eps delta)`: the step count at which the
/// summed per-step certificates reach `delta`.
pub fn bound_step_count(commutator: f64, epsilon: f64, total_time: f64, delta: f64) -> f64 {
    libm::ceil(total_time * total_time * commutator / (2.0 * epsilon * delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::lindblad::{ops, LindbladGenerator};
    use alloc::vec;

    fn dephasing_pair() -> StiffGenerator {
        let z = ops::pauli_z();
        let fast = LindbladGenerator::new(ComplexMatrix::zeros(2, 2), vec![z.clone()]).unwrap();
        let slow = LindbladGenerator::new(z.scale_re(0.3), vec![z.scale_re(0.5)]).unwrap();
        StiffGenerator::new(fast, slow, 0.1).unwrap()
    }

    #[test]
    fn commuting_parts_are_exact() {
        let sg = dephasing_pair();
        for order in [1, 2] {
            let step = trotter_step(&sg, 0.3, order).unwrap();
            let exact = sg.full_superoperator().exp(0.3).unwrap();
            assert!(step.matrix().max_abs_diff(exact.matrix()) < 1e-12);
        }
        let c = trotter_error_certificate(&sg, 0.3).unwrap();
        assert_eq!(c.bound, 0.0);
        assert!(c.measured < 1e-12);
    }

    #[test]
    fn certificate_bounds_a_small_step() {
        let fast = LindbladGenerator::new(ComplexMatrix::zeros(2, 2), vec![ops::sigma_minus()]).unwrap();
        let slow = LindbladGenerator::new(ops::pauli_x().scale_re(0.5), vec![]).unwrap();
        let sg = StiffGenerator::new(fast, slow, 0.2).unwrap();
        let c = trotter_error_certificate(&sg, 0.01).unwrap();
        assert!(c.ratio <= 1.2 && c.ratio > 0.5, "{c:?}");
    }

    #[test]
    fn step_count_bracket() {
        let fast = LindbladGenerator::new(ComplexMatrix::zeros(2, 2), vec![ops::sigma_minus()]).unwrap();
        let slow = LindbladGenerator::new(ops::pauli_x().scale_re(0.5), vec![]).unwrap();
        let sg = StiffGenerator::new(fast, slow, 0.5).unwrap();
        let r = steps_to_tolerance(&sg, 1.0, 1e-3, 1, DistanceNorm::Induced, 1 << 16).unwrap();
        assert!(r.error <= 1e-3);
        let worse = trotter_step(&sg, 1.0 / (r.steps - 1) as f64, 1).unwrap().pow(r.steps - 1);
        let exact = sg.full_superoperator().exp(1.0).unwrap();
        assert!(crate::linalg::induced_trace_norm(&worse.sub(&exact)).value > 1e-3);
    }
}
