// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Time stepping for stiff generators: the plain Trotter baseline, layered
//! asymptotic-preserving steps, an integral-equation oracle, the grid harness
//! that measures all of them, and the gate-cost model.

mod duhamel;
mod layered;
mod resources;
mod sweep;
mod trotter;

pub use duhamel::{duhamel_oracle, interaction_term, DuhamelResult};
pub use layered::{
    build_step, digital_fast_layer, evolve, layered_step, project_cptp, slow_layer, taylor_substep, Evolution, Step,
    CP_ABORT, CP_TOLERANCE,
};
pub use resources::{resource_model, resource_model_with, CostConstants, ResourceEstimate, ResourceInputs};
pub use sweep::{ap_verify, ApFits, SpotCheck, SweepCell, SweepOptions, SweepReport, MIN_GRID_POINTS};
pub use trotter::{
    bound_step_count, certificate_from, commutator_diamond, steps_to_tolerance, trotter_error_certificate,
    trotter_step, StepCount, TrotterCertificate,
};

use alloc::format;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Mode {
    /// `exp(dt L_fast / eps)` after `exp(dt L_slow)`, order 1 or 2.
    StandardTrotter,
    /// Exact fast relaxation over the whole step, then the slow layer.
    LayeredAnalog,
    /// `N = ceil(dt / (eps tau))` truncated-series fast substeps, then the slow layer.
    LayeredDigital,
    /// `exp(dt eff) P`, with no fast dynamics at all.
    EffectiveOnly,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ProtocolConfig {
    pub mode: Mode,
    pub dt: f64,
    /// `tau_fast`, in units of the unscaled fast generator (digital mode).
    pub fast_substep: Option<f64>,
    /// Truncation order `r` of each digital fast substep.
    pub fast_order: u32,
    /// Splitting order `s` of the slow layer.
    pub slow_order: u32,
    /// Splitting order of the standard Trotter baseline.
    pub trotter_order: u32,
    pub total_time: f64,
}

impl ProtocolConfig {
    pub fn new(mode: Mode, dt: f64, total_time: f64) -> Self {
        Self { mode, dt, fast_substep: None, fast_order: 2, slow_order: 2, trotter_order: 1, total_time }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.total_time >= self.dt) {
            return Err(Error::InvalidParameter(format!(
                "total time {} is shorter than one step {}",
                self.total_time, self.dt
            )));
        }
        if !matches!(self.slow_order, 1 | 2) || !matches!(self.trotter_order, 1 | 2) {
            return Err(Error::InvalidParameter("splitting orders must be 1 or 2".into()));
        }
        if self.mode == Mode::LayeredDigital {
            match self.fast_substep {
                Some(t) if t > 0.0 && t.is_finite() => {}
                _ => return Err(Error::InvalidParameter("digital mode needs a positive fast substep".into())),
            }
            if self.fast_order == 0 {
                return Err(Error::InvalidParameter("fast substep order must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// `N = ceil(dt / (eps tau_fast))`, at least 1.
    pub fn fast_substeps(&self, epsilon: f64, dt: f64) -> usize {
        match self.fast_substep {
            Some(tau) => {
                let n = libm::ceil(dt / (epsilon * tau) - 1e-12);
                (n.max(1.0)) as usize
            }
            None => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorReport {
    /// Distance to `exp(dt L_eps)`.
    pub consistency_err: f64,
    /// Distance to `exp(dt eff) P`.
    pub asymptotic_err: f64,
    pub slow_err: f64,
    pub fast_err: f64,
    pub interaction_err: f64,
}

impl ErrorReport {
    /// `consistency <= slow + fast + interaction` with `1e-8` slack.
    pub fn triangle_holds(&self) -> bool {
        self.consistency_err <= self.slow_err + self.fast_err + self.interaction_err + 1e-8
    }
}
