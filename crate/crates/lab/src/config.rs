// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration. Every struct rejects unknown fields, and
//! `validate` runs before anything is computed or written.

use std::path::{Path, PathBuf};

use aplab_core::cavity::CavityModel;
use aplab_core::kinetic::KineticParams;
use aplab_core::metrics::DistanceNorm;
use aplab_core::protocol::{CostConstants, ProtocolConfig, MIN_GRID_POINTS};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, LabResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Stem of every artifact file name.
    pub name: String,
    /// Seeds random models and multi-start optimizers.
    #[serde(default)]
    pub seed: u64,
    /// Output directory; `--out` wins when both are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub experiment: Experiment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum(SpectrumSpec),
    Eliminate(EliminateSpec),
    Diamond(DiamondSpec),
    Simulate(SimulateSpec),
    Sweep(SweepSpec),
    Cavity(CavitySpec),
    Kinetic(KineticSpec),
    Resources(ResourcesSpec),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Spectrum(_) => "spectrum",
            Self::Eliminate(_) => "eliminate",
            Self::Diamond(_) => "diamond",
            Self::Simulate(_) => "simulate",
            Self::Sweep(_) => "sweep",
            Self::Cavity(_) => "cavity",
            Self::Kinetic(_) => "kinetic",
            Self::Resources(_) => "resources",
        }
    }
}

/// A generator split into a fast and a slow part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StiffModel {
    /// Damped cavity coupled to a qubit; `eps = g / kappa`.
    Cavity { omega_q: f64, g: f64, kappa: f64, n_max: usize },
    /// Random fast generator on the first factor (identity on the second)
    /// plus a random slow generator on the whole space.
    Random {
        d_fast: usize,
        d_slow: usize,
        #[serde(default = "one")]
        jumps: usize,
        #[serde(default = "one_f")]
        fast_scale: f64,
        #[serde(default = "half")]
        slow_scale: f64,
        epsilon: f64,
        /// Random stream; distinct models in one config use distinct streams.
        #[serde(default)]
        stream: u64,
    },
    /// Fast damping on the first qubit and a Hamiltonian on the second;
    /// the two parts commute.
    Commuting { epsilon: f64 },
}

/// A fast generator on its own, for spectral experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FastModel {
    /// `kappa D[a]` on the cavity, tensored with the qubit.
    CavityDamping {
        kappa: f64,
        n_max: usize,
        #[serde(default = "twenty")]
        samples: usize,
    },
    /// `rate (tr(X) I / d - X)`.
    Depolarizing { d: usize, rate: f64 },
    Random {
        d: usize,
        #[serde(default = "one")]
        jumps: usize,
        #[serde(default = "one_f")]
        scale: f64,
        #[serde(default)]
        stream: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DtScale {
    Absolute,
    /// Grid values are divided by `||L_slow||`.
    #[default]
    SlowNorm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub models: Vec<FastModel>,
    #[serde(default = "induced")]
    pub norm: DistanceNorm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EliminateSpec {
    pub model: StiffModel,
    pub eps_grid: Vec<f64>,
    #[serde(default = "one_f")]
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiamondSpec {
    pub channels: usize,
    pub dims: Vec<usize>,
    #[serde(default = "two")]
    pub kraus_rank: usize,
    pub pairs: usize,
    #[serde(default = "two")]
    pub ancilla: usize,
    pub phase_flip: f64,
    #[serde(default = "three")]
    pub random_starts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub model: StiffModel,
    /// A full evolution with this protocol, compared against the exact map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stiffness: Option<StiffnessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duhamel: Option<DuhamelSpec>,
}

/// Standard-Trotter step counts needed to reach `delta` as `eps` shrinks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StiffnessSpec {
    pub eps_grid: Vec<f64>,
    pub total_time: f64,
    pub delta: f64,
    #[serde(default = "one_u")]
    pub order: u32,
    #[serde(default = "induced")]
    pub norm: DistanceNorm,
    pub max_steps: u64,
}

/// Single-step certificates at `dt = dt_norm / ||L_eps||_1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSpec {
    pub dt_norm: Vec<f64>,
    /// Further models checked the same way.
    #[serde(default)]
    pub extra_models: Vec<StiffModel>,
    #[serde(default)]
    pub commuting_control: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DuhamelSpec {
    pub time: f64,
    #[serde(default = "one_u")]
    pub terms: u32,
    /// Grid for the slope of the routed interaction term.
    pub eps_grid: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub model: StiffModel,
    /// Mode and orders; `dt` and `total_time` are overwritten per cell.
    pub protocol: ProtocolConfig,
    pub eps_grid: Vec<f64>,
    pub dt_grid: Vec<f64>,
    #[serde(default)]
    pub dt_scale: DtScale,
    #[serde(default = "induced")]
    pub norm: DistanceNorm,
    #[serde(default = "four")]
    pub diamond_spots: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySpec {
    pub model: CavityModel,
    /// Random states for the projection check; 0 skips the spectrum.
    #[serde(default)]
    pub spectrum_samples: usize,
    #[serde(default)]
    pub purcell: bool,
    #[serde(default)]
    pub steady_state: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<CavitySweepSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySweepSpec {
    pub eps_grid: Vec<f64>,
    pub dt_grid: Vec<f64>,
    #[serde(default)]
    pub dt_scale: DtScale,
    #[serde(default = "four")]
    pub diamond_spots: usize,
    #[serde(default = "one_f")]
    pub c: f64,
    pub delta: f64,
    /// Simulated time entering the gate counts.
    #[serde(default = "one_f")]
    pub total_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KineticSpec {
    pub params: KineticParams,
    pub eps_grid: Vec<f64>,
    pub dt_grid: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourcesSpec {
    pub kappas: Vec<f64>,
    pub d_fast: Vec<usize>,
    pub d_slow: usize,
    pub cs: Vec<f64>,
    pub delta: f64,
    pub total_time: f64,
    #[serde(default = "one_f")]
    pub tau_n: f64,
    #[serde(default = "one_f")]
    pub poly_exponent: f64,
    #[serde(default)]
    pub constants: Option<CostConstants>,
}

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}
fn three() -> usize {
    3
}
fn four() -> usize {
    4
}
fn twenty() -> usize {
    20
}
fn one_u() -> u32 {
    1
}
fn one_f() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn induced() -> DistanceNorm {
    DistanceNorm::Induced
}

/// Largest Hilbert-space dimension accepted from a config.
pub const MAX_DIM: usize = 24;

fn invalid(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

fn positive(name: &str, v: f64) -> LabResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Fits need `MIN_GRID_POINTS` distinct positive values.
fn grid(name: &str, g: &[f64]) -> LabResult<()> {
    for &v in g {
        positive(name, v)?;
    }
    let mut s = g.to_vec();
    s.sort_by(f64::total_cmp);
    s.dedup();
    if s.len() < MIN_GRID_POINTS {
        return Err(invalid(format!(
            "{name} needs at least {MIN_GRID_POINTS} distinct points for a slope fit, got {}",
            s.len()
        )));
    }
    Ok(())
}

impl StiffModel {
    pub fn validate(&self) -> LabResult<()> {
        match *self {
            Self::Cavity { omega_q, g, kappa, n_max } => {
                CavityModel::new(omega_q, g, kappa, n_max).validate()?;
                positive("g", g)?;
                if 2 * (n_max + 1) > MAX_DIM {
                    return Err(invalid(format!("n_max {n_max} exceeds the dimension cap {MAX_DIM}")));
                }
            }
            Self::Random { d_fast, d_slow, jumps, fast_scale, slow_scale, epsilon, .. } => {
                if d_fast < 2 || d_slow < 1 || d_fast * d_slow > MAX_DIM {
                    return Err(invalid(format!("need d_fast >= 2 and d_fast d_slow <= {MAX_DIM}")));
                }
                if jumps == 0 {
                    return Err(invalid("random models need at least one jump operator"));
                }
                positive("fast_scale", fast_scale)?;
                positive("slow_scale", slow_scale)?;
                positive("epsilon", epsilon)?;
            }
            Self::Commuting { epsilon } => positive("epsilon", epsilon)?,
        }
        Ok(())
    }
}

impl FastModel {
    pub fn validate(&self) -> LabResult<()> {
        match *self {
            Self::CavityDamping { kappa, n_max, .. } => {
                positive("kappa", kappa)?;
                if n_max == 0 || 2 * (n_max + 1) > MAX_DIM {
                    return Err(invalid(format!("n_max must be in 1..={}", MAX_DIM / 2 - 1)));
                }
            }
            Self::Depolarizing { d, rate } => {
                if !(2..=MAX_DIM).contains(&d) {
                    return Err(invalid(format!("depolarizing dimension must be in 2..={MAX_DIM}")));
                }
                positive("rate", rate)?;
            }
            Self::Random { d, jumps, scale, .. } => {
                if !(2..=MAX_DIM).contains(&d) || jumps == 0 {
                    return Err(invalid("random fast model needs 2 <= d <= 24 and a jump"));
                }
                positive("scale", scale)?;
            }
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> LabResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// `sha256` of the compact serialization, defaults filled in.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        format!("{:x}", Sha256::digest(&bytes))
    }

    pub fn validate(&self) -> LabResult<()> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(invalid(format!("name {:?} must be non-empty [A-Za-z0-9_-]", self.name)));
        }
        match &self.experiment {
            Experiment::Spectrum(s) => {
                if s.models.is_empty() {
                    return Err(invalid("spectrum needs at least one model"));
                }
                s.models.iter().try_for_each(FastModel::validate)?;
            }
            Experiment::Eliminate(s) => {
                s.model.validate()?;
                grid("eps_grid", &s.eps_grid)?;
                positive("time", s.time)?;
            }
            Experiment::Diamond(s) => {
                if s.channels == 0 || s.pairs == 0 || s.dims.is_empty() {
                    return Err(invalid("diamond needs channels, pairs and dims"));
                }
                if s.dims.iter().any(|&d| !(2..=4).contains(&d)) {
                    return Err(invalid("diamond dims must lie in 2..=4"));
                }
                if s.kraus_rank == 0 || s.ancilla < 2 {
                    return Err(invalid("need kraus_rank >= 1 and ancilla >= 2"));
                }
                if !(0.0..=1.0).contains(&s.phase_flip) {
                    return Err(invalid("phase_flip must be a probability"));
                }
            }
            Experiment::Simulate(s) => {
                s.model.validate()?;
                if let Some(p) = &s.protocol {
                    p.validate()?;
                }
                if let Some(st) = &s.stiffness {
                    grid("stiffness.eps_grid", &st.eps_grid)?;
                    positive("total_time", st.total_time)?;
                    positive("delta", st.delta)?;
                    if !matches!(st.order, 1 | 2) || st.max_steps == 0 {
                        return Err(invalid("stiffness needs order 1 or 2 and max_steps >= 1"));
                    }
                }
                if let Some(c) = &s.certificate {
                    if c.dt_norm.is_empty() {
                        return Err(invalid("certificate needs at least one dt_norm"));
                    }
                    for &v in &c.dt_norm {
                        positive("dt_norm", v)?;
                    }
                    c.extra_models.iter().try_for_each(StiffModel::validate)?;
                }
                if let Some(d) = &s.duhamel {
                    positive("duhamel.time", d.time)?;
                    grid("duhamel.eps_grid", &d.eps_grid)?;
                    if !matches!(d.terms, 1 | 2) {
                        return Err(invalid("duhamel terms must be 1 or 2"));
                    }
                }
                if s.protocol.is_none() && s.stiffness.is_none() && s.certificate.is_none() && s.duhamel.is_none() {
                    return Err(invalid("simulate has nothing to do"));
                }
            }
            Experiment::Sweep(s) => {
                s.model.validate()?;
                s.protocol.validate()?;
                grid("eps_grid", &s.eps_grid)?;
                grid("dt_grid", &s.dt_grid)?;
            }
            Experiment::Cavity(s) => {
                s.model.validate()?;
                positive("g", s.model.g)?;
                if 2 * s.model.levels() > MAX_DIM {
                    return Err(invalid(format!("n_max {} exceeds the dimension cap", s.model.n_max)));
                }
                if let Some(w) = &s.sweep {
                    grid("sweep.eps_grid", &w.eps_grid)?;
                    grid("sweep.dt_grid", &w.dt_grid)?;
                    positive("delta", w.delta)?;
                    positive("total_time", w.total_time)?;
                    if !(w.c >= 1.0) {
                        return Err(invalid("locality exponent c must be >= 1"));
                    }
                }
                if s.spectrum_samples == 0 && !s.purcell && !s.steady_state && s.sweep.is_none() {
                    return Err(invalid("cavity has nothing to do"));
                }
            }
            Experiment::Kinetic(s) => {
                grid("eps_grid", &s.eps_grid)?;
                grid("dt_grid", &s.dt_grid)?;
                let p = &s.params;
                if p.nx < 8 || p.reference_refinement < 2 {
                    return Err(invalid("kinetic needs nx >= 8 and reference_refinement >= 2"));
                }
                positive("total_time", p.total_time)?;
                if !(p.amplitude.abs() < 1.0) {
                    return Err(invalid("amplitude must keep the density positive (|a| < 1)"));
                }
            }
            Experiment::Resources(s) => {
                if s.kappas.is_empty() || s.d_fast.is_empty() || s.cs.is_empty() || s.d_slow == 0 {
                    return Err(invalid("resources needs kappas, d_fast, cs and d_slow"));
                }
                for &k in &s.kappas {
                    positive("kappa", k)?;
                }
                if s.d_fast.contains(&0) || s.cs.iter().any(|&c| !(c >= 1.0)) {
                    return Err(invalid("need d_fast >= 1 and c >= 1"));
                }
                positive("delta", s.delta)?;
                positive("total_time", s.total_time)?;
                positive("tau_n", s.tau_n)?;
            }
        }
        Ok(())
    }
}
