// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate-count model. Every formula is evaluated with unit constants unless
//! calibrated; the analog fast layer costs nothing.

use alloc::format;

use crate::elimination::StiffGenerator;
use crate::error::{Error, Result};

/// Multiplicative constants of the four cost formulas.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CostConstants {
    pub c_std: f64,
    pub c_digital: f64,
    pub c_analog: f64,
    pub c_elim: f64,
}

impl Default for CostConstants {
    fn default() -> Self {
        Self { c_std: 1.0, c_digital: 1.0, c_analog: 1.0, c_elim: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ResourceInputs {
    /// Locality exponent `c >= 1`.
    pub c: f64,
    /// Target accuracy; enters as `(1 / delta)^poly_exponent`.
    pub delta: f64,
    pub poly_exponent: f64,
    pub total_time: f64,
    /// Slowest timescale; `1 / ||L_slow||_1` when absent.
    pub tau_n: Option<f64>,
    /// `tau_n / tau_1`; `tau_n gap_fast / eps` when absent.
    pub kappa: Option<f64>,
    pub constants: CostConstants,
}

impl ResourceInputs {
    pub fn new(c: f64, delta: f64, total_time: f64) -> Self {
        Self { c, delta, poly_exponent: 1.0, total_time, tau_n: None, kappa: None, constants: CostConstants::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResourceEstimate {
    pub c: f64,
    pub kappa: f64,
    pub d_fast: usize,
    pub d_slow: usize,
    pub d_tot: usize,
    pub tau_n: f64,
    /// `(1 / delta)^poly_exponent`.
    pub poly_delta: f64,
    pub g_std: f64,
    pub g_ap_digital: f64,
    pub g_ap_analog: f64,
    pub g_ap_elim: f64,
    /// Classical cost of building the effective generator, `d_tot^3`.
    pub t_precomp: f64,
    /// `g_std / g_ap_analog`.
    pub savings_ratio: f64,
}

/// Cost model for a generator with a declared tensor split.
pub fn resource_model(sg: &StiffGenerator, inputs: &ResourceInputs) -> Result<ResourceEstimate> {
    let split = sg.split.as_ref().ok_or(Error::MissingSplit)?;
    let tau_n = match inputs.tau_n {
        Some(t) => t,
        None => {
            let n = sg.slow_norm();
            if !(n > 0.0) {
                return Err(Error::InvalidParameter("slow part vanishes; supply tau_n".into()));
            }
            1.0 / n
        }
    };
    let kappa = match inputs.kappa {
        Some(k) => k,
        None => tau_n * sg.spectral_fast.require_gap()? / sg.epsilon,
    };
    resource_model_with(split.d_fast, split.d_slow, kappa, tau_n, inputs)
}

/// Cost model from raw parameters. `tau_1 = tau_n / kappa` sets the standard
/// step, so the savings ratio is `(c_std / c_analog) kappa d_fast^c` exactly.
pub fn resource_model_with(
    d_fast: usize,
    d_slow: usize,
    kappa: f64,
    tau_n: f64,
    inputs: &ResourceInputs,
) -> Result<ResourceEstimate> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
        }
    };
    positive("kappa", kappa)?;
    positive("tau_n", tau_n)?;
    positive("delta", inputs.delta)?;
    positive("total time", inputs.total_time)?;
    if !(inputs.c >= 1.0) || !(inputs.poly_exponent >= 0.0) {
        return Err(Error::InvalidParameter("need c >= 1 and a non-negative poly exponent".into()));
    }
    if d_fast == 0 || d_slow == 0 {
        return Err(Error::InvalidParameter("dimensions must be positive".into()));
    }
    let k = &inputs.constants;
    let d_tot = d_fast * d_slow;
    let poly = libm::pow(1.0 / inputs.delta, inputs.poly_exponent);
    let pw = |d: usize| libm::pow(d as f64, inputs.c);
    let t = inputs.total_time;
    let tau_1 = tau_n / kappa;
    let t_precomp = libm::pow(d_tot as f64, 3.0);
    let g_std = k.c_std * (t / tau_1) * pw(d_tot) * poly;
    let g_ap_analog = k.c_analog * (t / tau_n) * pw(d_slow) * poly;
    Ok(ResourceEstimate {
        c: inputs.c,
        kappa,
        d_fast,
        d_slow,
        d_tot,
        tau_n,
        poly_delta: poly,
        g_std,
        g_ap_digital: k.c_digital * (t / tau_1) * pw(d_tot) * poly,
        g_ap_analog,
        g_ap_elim: k.c_elim * (t / tau_n + t_precomp) * pw(d_slow) * poly,
        t_precomp,
        savings_ratio: g_std / g_ap_analog,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(kappa: f64, d_fast: usize, c: f64) -> ResourceEstimate {
        resource_model_with(d_fast, 2, kappa, 1.0, &ResourceInputs::new(c, 1e-3, 10.0)).unwrap()
    }

    #[test]
    fn savings_is_kappa_times_fast_dimension_power() {
        assert_eq!(est(100.0, 4, 1.0).savings_ratio, 400.0);
        for kappa in [10.0, 100.0, 1000.0] {
            for d in [2usize, 4, 8] {
                for c in [1.0, 2.0] {
                    let r = est(kappa, d, c).savings_ratio;
                    let want = kappa * libm::pow(d as f64, c);
                    assert!((r - want).abs() <= 1e-12 * want, "{kappa} {d} {c}: {r}");
                }
            }
        }
    }

    #[test]
    fn doubling_fast_dimension_at_c2_quadruples() {
        let a = est(50.0, 3, 2.0).savings_ratio;
        let b = est(50.0, 6, 2.0).savings_ratio;
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn digital_matches_standard_up_to_constants() {
        let e = est(100.0, 4, 1.0);
        assert_eq!(e.g_std / e.g_ap_digital, 1.0);
        assert_eq!(e.d_tot, 8);
        assert_eq!(e.t_precomp, 512.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(resource_model_with(4, 2, 0.0, 1.0, &ResourceInputs::new(1.0, 1e-3, 1.0)).is_err());
        assert!(resource_model_with(4, 2, 1.0, 1.0, &ResourceInputs::new(0.5, 1e-3, 1.0)).is_err());
    }
}
