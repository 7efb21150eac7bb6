// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

use alloc::format;

use super::{trotter_step, Mode, ProtocolConfig};
use crate::elimination::{effective_generator, EffectiveGenerator, StiffGenerator};
use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, ComplexMatrix, Superoperator};
use crate::lindblad::{choi_facts, partial_trace_first, Channel};

/// Choi eigenvalues down to `-CP_TOLERANCE` (of `J / d`) count as CP.
pub const CP_TOLERANCE: f64 = 1e-8;
/// Below `-CP_ABORT` an evolution is rejected outright.
pub const CP_ABORT: f64 = 1e-4;
/// Digital substeps are projected back to CPTP below this Choi eigenvalue.
const CLIP_THRESHOLD: f64 = 1e-10;

/// One step of a protocol and the layers it was built from.
#[derive(Clone, Debug)]
pub struct Step {
    pub map: Superoperator,
    pub slow: Superoperator,
    pub fast: Superoperator,
    pub fast_substeps: usize,
    /// Largest Choi negativity removed from a digital substep.
    pub clip_violation: f64,
}

/// Order-`s` approximation of `exp(dt L_slow)`, splitting into the declared
/// interaction and the rest, or else into Hamiltonian and dissipative parts.
pub fn slow_layer(sg: &StiffGenerator, dt: f64, order: u32) -> Result<Superoperator> {
    let ls = sg.slow.superoperator();
    let (a, b) = match &sg.interaction {
        Some(int) => (int.superoperator().clone(), ls.sub(int.superoperator())),
        None => {
            (sg.slow.hamiltonian_part().superoperator().clone(), sg.slow.dissipative_part().superoperator().clone())
        }
    };
    match order {
        1 => Ok(b.exp(dt)?.compose(&a.exp(dt)?)),
        2 => {
            let half = a.exp(0.5 * dt)?;
            Ok(half.compose(&b.exp(dt)?).compose(&half))
        }
        _ => Err(Error::InvalidParameter(format!("slow order must be 1 or 2, got {order}"))),
    }
}

/// `sum_{k <= r} (tau L)^k / k!`.
pub fn taylor_substep(l: &Superoperator, tau: f64, order: u32) -> Superoperator {
    let n = l.dim();
    let a = l.scale(tau);
    let mut term = Superoperator::identity(n);
    let mut sum = term.clone();
    for k in 1..=order {
        term = a.compose(&term).scale(1.0 / k as f64);
        sum = sum.add(&term);
    }
    sum
}

/// Nearest-CPTP repair used on truncated-series substeps: clip negative Choi
/// eigenvalues, then restore trace preservation by the congruence
/// `J -> (I (x) A^{-1/2}) J (I (x) A^{-1/2})` with `A = Tr_out J`.
/// Returns the repaired map and the negativity that was removed.
pub fn project_cptp(s: &Superoperator) -> Result<(Superoperator, f64)> {
    let d = s.dim();
    let j = s.choi().hermitian_part();
    let e = eigh(&j)?;
    let violation = (-e.min() / d as f64).max(0.0);
    if violation <= CLIP_THRESHOLD {
        return Ok((s.clone(), violation));
    }
    let clipped = e.map_values(|l| l.max(0.0));
    let a = partial_trace_first(&clipped, d, d);
    let ea = eigh(&a)?;
    if ea.min() <= 0.0 {
        return Err(Error::NotCptp(format!("clipped substep loses rank (min marginal {:e})", ea.min())));
    }
    let w = kron(&ComplexMatrix::identity(d), &ea.map_values(|l| 1.0 / libm::sqrt(l)));
    let fixed = (&(&w * &clipped) * &w).hermitian_part();
    Ok((Superoperator::from_choi(d, &fixed)?, violation))
}

/// `(T_r(tau L_fast))^N` with `N = ceil(dt / (eps tau))`.
pub fn digital_fast_layer(sg: &StiffGenerator, dt: f64, tau: f64, order: u32) -> Result<(Superoperator, usize, f64)> {
    let raw = taylor_substep(sg.fast.superoperator(), tau, order);
    let (sub, violation) = project_cptp(&raw)?;
    let n = libm::ceil(dt / (sg.epsilon * tau) - 1e-12).max(1.0) as usize;
    Ok((sub.pow(n as u64), n, violation))
}

/// Build one protocol step of length `dt`. `eff` is only needed (and
/// computed when absent) for the effective-only mode.
pub fn build_step(
    sg: &StiffGenerator,
    cfg: &ProtocolConfig,
    dt: f64,
    eff: Option<&EffectiveGenerator>,
) -> Result<Step> {
    cfg.validate()?;
    match cfg.mode {
        Mode::StandardTrotter => {
            let map = trotter_step(sg, dt, cfg.trotter_order)?;
            let fast = sg.fast.superoperator().scale(1.0 / sg.epsilon).exp(dt)?;
            let slow = sg.slow.superoperator().exp(dt)?;
            Ok(Step { map, slow, fast, fast_substeps: 1, clip_violation: 0.0 })
        }
        Mode::LayeredAnalog => {
            let fast = sg.fast.superoperator().scale(1.0 / sg.epsilon).exp(dt)?;
            let slow = slow_layer(sg, dt, cfg.slow_order)?;
            Ok(Step { map: slow.compose(&fast), slow, fast, fast_substeps: 1, clip_violation: 0.0 })
        }
        Mode::LayeredDigital => {
            let tau = cfg.fast_substep.expect("validated");
            let (fast, n, clip) = digital_fast_layer(sg, dt, tau, cfg.fast_order)?;
            let slow = slow_layer(sg, dt, cfg.slow_order)?;
            Ok(Step { map: slow.compose(&fast), slow, fast, fast_substeps: n, clip_violation: clip })
        }
        Mode::EffectiveOnly => {
            let owned;
            let eff = match eff {
                Some(e) => e,
                None => {
                    owned = effective_generator(sg)?;
                    &owned
                }
            };
            let map = eff.propagator(dt)?;
            Ok(Step {
                map,
                slow: eff.superoperator.exp(dt)?,
                fast: eff.projection.clone(),
                fast_substeps: 0,
                clip_violation: 0.0,
            })
        }
    }
}

/// A single layered (or baseline) step of length `cfg.dt`, classified.
pub fn layered_step(sg: &StiffGenerator, cfg: &ProtocolConfig) -> Result<Channel> {
    Channel::classify(build_step(sg, cfg, cfg.dt, None)?.map)
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub channel: Superoperator,
    pub steps: u64,
    /// `T / steps`; equals `dt` whenever `dt` divides `T`.
    pub dt_effective: f64,
    pub min_choi_eigenvalue: f64,
    pub trace_defect: f64,
    /// CP holds within `CP_TOLERANCE`.
    pub cptp: bool,
}

/// `ceil(T / dt)` steps of length `T / n`, composed by repeated squaring.
pub fn evolve(sg: &StiffGenerator, cfg: &ProtocolConfig) -> Result<Evolution> {
    cfg.validate()?;
    let steps = libm::ceil(cfg.total_time / cfg.dt - 1e-9).max(1.0) as u64;
    let dt = cfg.total_time / steps as f64;
    let step = build_step(sg, cfg, dt, None)?;
    let channel = step.map.pow(steps);
    let facts = choi_facts(&channel)?;
    if facts.min_eigenvalue < -CP_ABORT {
        return Err(Error::NotCptp(format!(
            "evolved map has Choi eigenvalue {:e} after {steps} steps",
            facts.min_eigenvalue
        )));
    }
    Ok(Evolution {
        channel,
        steps,
        dt_effective: dt,
        min_choi_eigenvalue: facts.min_eigenvalue,
        trace_defect: facts.trace_defect,
        cptp: facts.min_eigenvalue >= -CP_TOLERANCE,
    })
}
