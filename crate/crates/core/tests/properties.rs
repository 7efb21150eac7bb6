// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Structural invariants on randomly drawn models.

use aplab_core::kinetic::{imex_step, smooth_equilibrium, Relaxation, Velocities, VelocitySet, CFL};
use aplab_core::linalg::{induced_trace_norm, Superoperator};
use aplab_core::lindblad::choi_facts;
use aplab_core::metrics::diamond_norm;
use aplab_core::protocol::{resource_model_with, ResourceInputs};
use aplab_core::rng;
use aplab_core::spectral::analyze;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn generated_semigroup_is_cptp(seed in any::<u64>(), d in 2usize..5, jumps in 1usize..3, t in 0.01f64..3.0) {
        let mut r = rng::stream(seed, 0);
        let g = rng::lindbladian(&mut r, d, jumps, 1.0);
        prop_assert!(g.trace_annihilation_residual() < 1e-12);
        let facts = choi_facts(&g.superoperator().exp(t).unwrap()).unwrap();
        prop_assert!(facts.min_eigenvalue > -1e-10, "{}", facts.min_eigenvalue);
        prop_assert!(facts.trace_defect < 1e-10);
    }

    #[test]
    fn projection_and_drazin_identities(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng::stream(seed, 1);
        let g = rng::lindbladian(&mut r, d, 2, 1.0);
        let sd = analyze(&g).unwrap();
        let l = g.superoperator();
        let p = &sd.projection;
        let scale = l.matrix().norm_one();
        prop_assert!(p.compose(p).matrix().max_abs_diff(p.matrix()) < 1e-9);
        prop_assert!(l.compose(p).matrix().max_abs() < 1e-9 * scale);
        prop_assert!(p.compose(l).matrix().max_abs() < 1e-9 * scale);
        let q = Superoperator::identity(d).sub(p);
        prop_assert!(l.compose(&sd.drazin).matrix().max_abs_diff(q.matrix()) < 1e-8);
    }

    #[test]
    fn induced_norm_triangle_and_scaling(seed in any::<u64>(), a in -3.0f64..3.0) {
        let mut r = rng::stream(seed, 2);
        let x = rng::channel(&mut r, 2, 2).sub(&rng::channel(&mut r, 2, 3));
        let y = rng::channel(&mut r, 2, 1).sub(&rng::channel(&mut r, 2, 2));
        let n = |m: &Superoperator| induced_trace_norm(m).value;
        prop_assert!(n(&x.add(&y)) <= n(&x) + n(&y) + 1e-8);
        prop_assert!((n(&x.scale(a)) - a.abs() * n(&x)).abs() <= 1e-8 * (1.0 + n(&x)));
    }

    #[test]
    fn resource_ratio_is_exact(kappa in 1.0f64..1e4, d_fast in 1usize..10, c in 1.0f64..3.0) {
        let e = resource_model_with(d_fast, 3, kappa, 0.7, &ResourceInputs::new(c, 1e-2, 5.0)).unwrap();
        let want = kappa * libm::pow(d_fast as f64, c);
        prop_assert!((e.savings_ratio - want).abs() <= 1e-12 * want);
        prop_assert_eq!(e.d_tot, 3 * d_fast);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn channels_have_unit_diamond_norm(seed in any::<u64>(), d in 2usize..4, k in 1usize..4) {
        let mut r = rng::stream(seed, 3);
        let v = diamond_norm(&rng::channel(&mut r, d, k)).unwrap().value;
        prop_assert!((v - 1.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn kinetic_mass_is_conserved(amp in 0.0f64..0.9, eps in 1e-8f64..1.0, frac in 0.1f64..1.0, gh in any::<bool>()) {
        let set = if gh { VelocitySet::GaussHermite { points: 8 } } else { VelocitySet::TwoVelocity { drift: 0.3 } };
        let vel = Velocities::new(set).unwrap();
        let mut s = smooth_equilibrium(&vel, 40, eps, amp).unwrap();
        let dt = frac * CFL * s.dx / vel.max_speed();
        let m0 = s.mass(&vel);
        for _ in 0..10 {
            s = imex_step(&vel, &s, dt, Relaxation::Implicit).unwrap();
        }
        prop_assert!((s.mass(&vel) - m0).abs() < 1e-12 * m0);
    }
}
