// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end runs through the cavity model.

use aplab_core::cavity::{build_cavity, purcell_check, CavityModel};
use aplab_core::elimination::{dynamics_error, effective_generator};
use aplab_core::linalg::induced_trace_norm;
use aplab_core::metrics::DistanceNorm;
use aplab_core::protocol::{
    duhamel_oracle, evolve, resource_model, steps_to_tolerance, Mode, ProtocolConfig, ResourceInputs,
};

fn model() -> CavityModel {
    CavityModel::new(1.0, 0.1, 10.0, 3)
}

#[test]
fn layered_evolution_tracks_the_reduced_dynamics() {
    let sg = build_cavity(&CavityModel::new(1.0, 0.1, 40.0, 3)).unwrap();
    let eff = effective_generator(&sg).unwrap();
    let target = eff.propagator(5.0).unwrap();
    let err = |dt: f64| {
        let ev = evolve(&sg, &ProtocolConfig::new(Mode::LayeredAnalog, dt, 5.0)).unwrap();
        assert!(ev.cptp && ev.trace_defect < 1e-10);
        induced_trace_norm(&ev.channel.sub(&target)).value
    };
    // kappa dt >= 5 relaxes the cavity each step; the rest is first-order
    // splitting error, halving with dt.
    let (a, b) = (err(0.25), err(0.125));
    assert!(a < 0.1 && a / b > 1.6 && a / b < 2.4, "{a} {b}");
    assert!(dynamics_error(&sg, &eff, 5.0).unwrap() < 0.02);
}

#[test]
fn duhamel_cross_checks_the_exact_propagator() {
    let sg = build_cavity(&CavityModel::new(1.0, 0.3, 3.0, 2)).unwrap();
    let exact = sg.full_superoperator().exp(0.5).unwrap();
    let r = duhamel_oracle(&sg, 0.5, 1).unwrap();
    assert!(r.value.matrix().max_abs_diff(exact.matrix()) < 1e-8);
}

#[test]
fn resources_follow_the_split() {
    let sg = build_cavity(&model()).unwrap();
    let mut inputs = ResourceInputs::new(1.0, 1e-3, 10.0);
    inputs.tau_n = Some(1.0 / 0.1);
    let e = resource_model(&sg, &inputs).unwrap();
    assert_eq!((e.d_fast, e.d_slow, e.d_tot), (4, 2, 8));
    let want = e.kappa * 4.0;
    assert!((e.savings_ratio - want).abs() < 1e-9 * want);
}

#[test]
fn purcell_and_trotter_agree_on_the_slow_scale() {
    let r = purcell_check(&CavityModel::new(1.0, 0.1, 10.0, 4)).unwrap();
    assert!((r.gamma_measured / r.gamma_expected - 1.0).abs() < 1e-8);
    let sg = build_cavity(&model()).unwrap();
    let n = steps_to_tolerance(&sg, 1.0, 1e-2, 2, DistanceNorm::Induced, 1 << 12).unwrap();
    assert!(n.error <= 1e-2 && n.steps >= 1);
}
