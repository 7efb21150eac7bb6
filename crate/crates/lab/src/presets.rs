// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Built-in experiment configs.

use aplab_core::cavity::CavityModel;
use aplab_core::kinetic::KineticParams;
use aplab_core::metrics::DistanceNorm;

use crate::config::*;

pub const SEED: u64 = 20_261_018;

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "cavity-purcell",
        description: "Purcell-rate elimination, cutoff sensitivity and steady state at omega_q=1, g=0.1, kappa=10, n_max=4",
    },
    Preset {
        name: "cavity-ap-sweep",
        description: "layered-analog error against exp(dt eff) P over a 4x4 (eps, dt) grid with diamond spot checks",
    },
    Preset {
        name: "trotter-stiffness",
        description: "standard Trotter step counts versus eps and single-step error certificates",
    },
    Preset {
        name: "diamond-properties",
        description: "diamond norm of channels, ancilla stability, triangle and submultiplicativity, phase flip",
    },
    Preset {
        name: "elimination-order",
        description: "exact Schur complement against the second-order effective generator on a random d=6 model",
    },
    Preset {
        name: "kinetic-ap",
        description: "two-velocity BGK model: eps-uniform stability, fluid-limit deviation and mass drift",
    },
    Preset { name: "resource-table", description: "gate-count model over kappa, d_fast and c with unit constants" },
    Preset { name: "spectral-decay", description: "damped-cavity spectrum and projection; fitted relaxation rate against the gap for cavity and depolarizing generators" },
    Preset { name: "duhamel-identity", description: "integral-equation oracle against the exponential and the routed interaction term" },
];

fn cfg(name: &str, experiment: Experiment) -> ExperimentConfig {
    ExperimentConfig { name: name.into(), seed: SEED, output: None, experiment }
}

fn cavity_model(kappa: f64) -> StiffModel {
    StiffModel::Cavity { omega_q: 1.0, g: 0.1, kappa, n_max: 4 }
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let reference = CavityModel::new(1.0, 0.1, 10.0, 4);
    let e = match name {
        "cavity-purcell" => Experiment::Cavity(CavitySpec {
            model: reference,
            spectrum_samples: 0,
            purcell: true,
            steady_state: true,
            sweep: None,
        }),
        "cavity-ap-sweep" => Experiment::Cavity(CavitySpec {
            model: reference,
            spectrum_samples: 0,
            purcell: false,
            steady_state: false,
            sweep: Some(CavitySweepSpec {
                eps_grid: vec![1e-1, 3e-2, 1e-2, 3e-3],
                dt_grid: vec![0.2, 0.1, 0.05, 0.025],
                dt_scale: DtScale::SlowNorm,
                diamond_spots: 4,
                c: 1.0,
                delta: 1e-3,
                total_time: 10.0,
            }),
        }),
        "trotter-stiffness" => Experiment::Simulate(SimulateSpec {
            model: cavity_model(1.0),
            protocol: None,
            stiffness: Some(StiffnessSpec {
                eps_grid: vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3],
                total_time: 1.0,
                delta: 1e-3,
                order: 1,
                norm: DistanceNorm::Induced,
                max_steps: 1 << 22,
            }),
            certificate: Some(CertificateSpec {
                dt_norm: vec![0.1, 0.05, 0.02],
                extra_models: vec![StiffModel::Random {
                    d_fast: 2,
                    d_slow: 2,
                    jumps: 1,
                    fast_scale: 1.0,
                    slow_scale: 0.5,
                    epsilon: 0.1,
                    stream: 1,
                }],
                commuting_control: true,
            }),
            duhamel: None,
        }),
        "diamond-properties" => Experiment::Diamond(DiamondSpec {
            channels: 10,
            dims: vec![2, 3, 4],
            kraus_rank: 2,
            pairs: 10,
            ancilla: 2,
            phase_flip: 0.25,
            random_starts: 3,
        }),
        "elimination-order" => Experiment::Eliminate(EliminateSpec {
            model: StiffModel::Random {
                d_fast: 3,
                d_slow: 2,
                jumps: 2,
                fast_scale: 1.0,
                slow_scale: 0.5,
                epsilon: 0.1,
                stream: 0,
            },
            eps_grid: vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3],
            time: 1.0,
        }),
        "kinetic-ap" => Experiment::Kinetic(KineticSpec {
            params: KineticParams::default(),
            eps_grid: vec![1.0, 1e-2, 1e-4, 1e-8],
            dt_grid: vec![4e-3, 2e-3, 1e-3, 5e-4],
        }),
        "resource-table" => Experiment::Resources(ResourcesSpec {
            kappas: vec![10.0, 100.0, 1000.0],
            d_fast: vec![2, 4, 8],
            d_slow: 2,
            cs: vec![1.0, 2.0],
            delta: 1e-3,
            total_time: 10.0,
            tau_n: 1.0,
            poly_exponent: 1.0,
            constants: None,
        }),
        "spectral-decay" => Experiment::Spectrum(SpectrumSpec {
            models: vec![
                FastModel::CavityDamping { kappa: 10.0, n_max: 4, samples: 20 },
                FastModel::Depolarizing { d: 3, rate: 1.0 },
            ],
            norm: DistanceNorm::Induced,
        }),
        "duhamel-identity" => Experiment::Simulate(SimulateSpec {
            model: StiffModel::Random {
                d_fast: 2,
                d_slow: 2,
                jumps: 1,
                fast_scale: 1.0,
                slow_scale: 0.5,
                epsilon: 0.05,
                stream: 2,
            },
            protocol: None,
            stiffness: None,
            certificate: None,
            duhamel: Some(DuhamelSpec { time: 1.0, terms: 1, eps_grid: vec![1e-2, 5e-3, 2e-3, 1e-3] }),
        }),
        _ => return None,
    };
    Some(cfg(name, e))
}
