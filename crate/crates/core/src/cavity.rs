// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Truncated cavity coupled to a qubit in the bad-cavity limit.
//!
//! The Hilbert space is `cavity (x) qubit`. The cavity decays at rate `kappa`
//! and the qubit sees `H = omega_q sigma_z / 2 + g (sigma_+ a + sigma_- a^dag)`.
//! With `eps = g / kappa` the fast part is the unscaled `g D[a]`, so that
//! `L_fast / eps = kappa D[a]`, and varying `eps` at fixed `g` leaves `L_slow`
//! untouched.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::elimination::{compress, effective_generator, StiffGenerator};
use crate::error::{Error, Result};
use crate::exec::CellExecutor;
use crate::linalg::{induced_trace_norm, kron, ComplexMatrix, Superoperator, C64};
use crate::lindblad::{hamiltonian_superoperator, ops, partial_trace_first, LindbladGenerator};
use crate::metrics::DistanceNorm;
use crate::protocol::{
    ap_verify, resource_model_with, Mode, ProtocolConfig, ResourceEstimate, ResourceInputs, SweepOptions, SweepReport,
};
use crate::rng;
use crate::spectral::{analyze, primitivity_from};

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CavityModel {
    pub omega_q: f64,
    pub g: f64,
    pub kappa: f64,
    pub n_max: usize,
}

impl CavityModel {
    pub fn new(omega_q: f64, g: f64, kappa: f64, n_max: usize) -> Self {
        Self { omega_q, g, kappa, n_max }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {}", self.kappa)));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) || !self.omega_q.is_finite() {
            return Err(Error::InvalidParameter("g must be non-negative and omega_q finite".into()));
        }
        if self.n_max < 2 {
            return Err(Error::InvalidParameter(format!("Fock cutoff must be at least 2, got {}", self.n_max)));
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        self.g / self.kappa
    }

    /// `4 g^2 / kappa`.
    pub fn purcell_rate(&self) -> f64 {
        4.0 * self.g * self.g / self.kappa
    }

    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    /// Same couplings with the cavity decay set by `eps = g / kappa`.
    pub fn at_epsilon(&self, eps: f64) -> Self {
        Self { kappa: self.g / eps, ..*self }
    }
}

/// `kappa D[a]` on the cavity alone.
pub fn cavity_damping(m: &CavityModel) -> Result<LindbladGenerator> {
    let a = ops::annihilation(m.levels());
    LindbladGenerator::new(ComplexMatrix::zeros(m.levels(), m.levels()), vec![a.scale_re(libm::sqrt(m.kappa))])
}

fn qubit_hamiltonian(m: &CavityModel) -> ComplexMatrix {
    ops::sigma_z().scale_re(0.5 * m.omega_q)
}

fn exchange(m: &CavityModel) -> ComplexMatrix {
    let h = kron(&ops::annihilation(m.levels()), &ops::sigma_plus());
    (&h + &h.adjoint()).scale_re(m.g)
}

pub fn build_cavity(m: &CavityModel) -> Result<StiffGenerator> {
    m.validate()?;
    if m.g == 0.0 {
        return Err(Error::InvalidParameter("g = 0 leaves eps = g / kappa undefined".into()));
    }
    let n = m.levels();
    let a = kron(&ops::annihilation(n), &ComplexMatrix::identity(2));
    let fast = LindbladGenerator::new(ComplexMatrix::zeros(2 * n, 2 * n), vec![a.scale_re(libm::sqrt(m.g))])?;
    let h_q = kron(&ComplexMatrix::identity(n), &qubit_hamiltonian(m));
    let h_int = exchange(m);
    let slow = LindbladGenerator::new(&h_q + &h_int, vec![])?;
    let interaction = LindbladGenerator::new(h_int, vec![])?;
    StiffGenerator::new(fast, slow, m.epsilon())?.with_split(n, 2, ops::unit(n, 0, 0))?.with_interaction(interaction)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CavitySpectrum {
    /// Gap of `kappa D[a] (x) I`.
    pub gap: f64,
    pub kappa: f64,
    /// `|gap - kappa| / kappa`.
    pub gap_relative_error: f64,
    pub kernel_dim: usize,
    /// Worst `max |P(rho) - |0><0| (x) tr_cav rho|` over the sampled states.
    pub projection_error: f64,
    /// Largest distance from `-kappa n`, `n = 0..=n_max`, to the spectrum of
    /// `kappa D[a]` on the cavity.
    pub ladder_error: f64,
    pub eigenvalues: Vec<C64>,
}

/// Spectrum of the scaled fast part `kappa D[a] (x) I`.
pub fn cavity_spectrum(m: &CavityModel, samples: usize, seed: u64) -> Result<CavitySpectrum> {
    m.validate()?;
    let n = m.levels();
    let damping = cavity_damping(m)?;
    let sd = analyze(&damping.tensor_right(2))?;
    let gap = sd.gap.unwrap_or(0.0);
    let vacuum = ops::unit(n, 0, 0);
    let mut r = rng::stream(seed, 0);
    let mut projection_error: f64 = 0.0;
    for _ in 0..samples {
        let rho = rng::density(&mut r, 2 * n, 2 * n);
        let want = kron(&vacuum, &partial_trace_first(&rho, n, 2));
        projection_error = projection_error.max(sd.projection.apply(&rho).max_abs_diff(&want));
    }
    let cav = analyze(&damping)?;
    let ladder_error = (0..n)
        .map(|k| {
            let target = C64::new(-m.kappa * k as f64, 0.0);
            cav.eigenvalues.iter().map(|&l| (l - target).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(CavitySpectrum {
        gap,
        kappa: m.kappa,
        gap_relative_error: (gap - m.kappa).abs() / m.kappa,
        kernel_dim: sd.kernel_dim,
        projection_error,
        ladder_error,
        eigenvalues: sd.eigenvalues,
    })
}

#[derive(Clone, Debug)]
pub struct PurcellReport {
    pub gamma_expected: f64,
    /// Read off the reduced generator as the decay rate of `|e><e|`.
    pub gamma_measured: f64,
    /// Entrywise distance to `-i[omega_q sigma_z / 2, .] + gamma D[sigma_-]`.
    pub max_entry_error: f64,
    /// Entrywise change of the reduced generator from `n_max` to `n_max + 2`.
    pub cutoff_sensitivity: f64,
    /// Coupling left in the first-order reduced term, entrywise against the
    /// bare qubit rotation.
    pub first_order_coupling: f64,
    pub reduced: Superoperator,
    pub target: Superoperator,
}

fn reduced_generator(m: &CavityModel) -> Result<(Superoperator, Superoperator)> {
    let sg = build_cavity(m)?;
    let eff = effective_generator(&sg)?;
    let split = sg.split.as_ref().ok_or(Error::MissingSplit)?;
    let reduced = eff.reduced.clone().ok_or(Error::MissingSplit)?;
    Ok((reduced, compress(&eff.first_order, split)))
}

pub fn purcell_check(m: &CavityModel) -> Result<PurcellReport> {
    if m.n_max < 3 {
        return Err(Error::InvalidParameter(format!("Purcell check needs n_max >= 3, got {}", m.n_max)));
    }
    let gamma = m.purcell_rate();
    let rotation = hamiltonian_superoperator(&qubit_hamiltonian(m));
    let target = LindbladGenerator::new(qubit_hamiltonian(m), vec![ops::sigma_minus().scale_re(libm::sqrt(gamma))])?
        .superoperator()
        .clone();
    if m.g == 0.0 {
        // No coupling: nothing to eliminate and the qubit only rotates.
        return Ok(PurcellReport {
            gamma_expected: 0.0,
            gamma_measured: 0.0,
            max_entry_error: 0.0,
            cutoff_sensitivity: 0.0,
            first_order_coupling: 0.0,
            reduced: rotation.clone(),
            target,
        });
    }
    let (reduced, first) = reduced_generator(m)?;
    let (bigger, _) = reduced_generator(&CavityModel { n_max: m.n_max + 2, ..*m })?;
    let excited = ops::unit(2, 1, 1);
    let gamma_measured = -reduced.apply(&excited)[(1, 1)].re;
    Ok(PurcellReport {
        gamma_expected: gamma,
        gamma_measured,
        max_entry_error: reduced.matrix().max_abs_diff(target.matrix()),
        cutoff_sensitivity: reduced.matrix().max_abs_diff(bigger.matrix()),
        first_order_coupling: first.matrix().max_abs_diff(rotation.matrix()),
        reduced,
        target,
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SteadyStateReport {
    pub time: f64,
    /// Induced trace distance of `exp(t L_eps)` from `X -> tr X |0,g><0,g|`.
    pub distance: f64,
    pub unique: bool,
}

/// Relaxation of the full model to the joint ground state at `t = 50 / gamma`.
pub fn steady_state_endpoint(m: &CavityModel) -> Result<SteadyStateReport> {
    let sg = build_cavity(m)?;
    let t = 50.0 / m.purcell_rate();
    let full = sg.full_superoperator();
    let evolved = full.exp(t)?;
    let d = sg.dim();
    let ground = ops::unit(d, 0, 0);
    let reset = Superoperator::from_map(d, |x| ground.scale(x.trace()));
    let sd = crate::spectral::analyze_superoperator(&full)?;
    let unique = primitivity_from(&sd).map(|p| p.gapped_unique).unwrap_or(false);
    Ok(SteadyStateReport { time: t, distance: induced_trace_norm(&evolved.sub(&reset)).value, unique })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwoTermFit {
    /// `A` in `A eps dt + B dt^2`.
    pub c_eps_dt: f64,
    pub c_dt2: f64,
    /// Largest `|fit - measured| / measured` over the grid.
    pub max_relative_residual: f64,
}

/// Relative least squares for `err ~ A eps dt + B dt^2`.
pub fn fit_two_term(points: &[(f64, f64, f64)]) -> Result<TwoTermFit> {
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(eps, dt, e) in points.iter().filter(|p| p.2 > 0.0) {
        let (x1, x2) = (eps * dt / e, dt * dt / e);
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1;
        b2 += x2;
    }
    let det = s11 * s22 - s12 * s12;
    if !(det.abs() > 1e-300) {
        return Err(Error::Fit("two-term bound is degenerate on this grid".into()));
    }
    let a = (s22 * b1 - s12 * b2) / det;
    let b = (s11 * b2 - s12 * b1) / det;
    let max_relative_residual = points
        .iter()
        .filter(|p| p.2 > 0.0)
        .map(|&(eps, dt, e)| ((a * eps * dt + b * dt * dt) - e).abs() / e)
        .fold(0.0, f64::max);
    Ok(TwoTermFit { c_eps_dt: a, c_dt2: b, max_relative_residual })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CavitySweep {
    pub report: SweepReport,
    pub bound: Option<TwoTermFit>,
    /// One per eps, with `tau_n = 1 / g` and `tau_1 = 1 / kappa`.
    pub resources: Vec<ResourceEstimate>,
}

/// Layered-analog sweep with `eps` varied through `kappa`.
pub fn cavity_ap_sweep<E: CellExecutor>(
    m: &CavityModel,
    dt_grid: &[f64],
    eps_grid: &[f64],
    resources: &ResourceInputs,
    opts: &SweepOptions,
    exec: &E,
) -> Result<CavitySweep> {
    m.validate()?;
    let eps_max = eps_grid.iter().copied().fold(0.0, f64::max);
    let gamma_max = m.at_epsilon(eps_max).purcell_rate();
    let limit = (1.0 / m.omega_q.abs()).min(1.0 / gamma_max);
    if let Some(&bad) = dt_grid.iter().find(|&&dt| dt > limit) {
        return Err(Error::InvalidParameter(format!("dt {bad} exceeds min(1/omega_q, 1/gamma) = {limit}")));
    }
    let sg = build_cavity(m)?;
    let cfg = ProtocolConfig::new(Mode::LayeredAnalog, dt_grid[0], dt_grid.iter().copied().fold(0.0, f64::max));
    let report = ap_verify(&sg, &cfg, eps_grid, dt_grid, DistanceNorm::Induced, opts, exec)?;
    let points: Vec<(f64, f64, f64)> = report.cells.iter().map(|c| (c.eps, c.dt, c.errors.asymptotic_err)).collect();
    let bound = fit_two_term(&points).ok();
    let resources = eps_grid
        .iter()
        .map(|&eps| {
            let kappa = m.g / eps;
            resource_model_with(m.levels(), 2, kappa / m.g, 1.0 / m.g, resources)
        })
        .collect::<Result<_>>()?;
    Ok(CavitySweep { report, bound, resources })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> CavityModel {
        CavityModel::new(1.0, 0.1, 10.0, 4)
    }

    #[test]
    fn dimensions_and_kernel() {
        let sg = build_cavity(&reference()).unwrap();
        assert_eq!(sg.dim(), 10);
        assert_eq!(sg.spectral_fast.kernel_dim, 4);
        assert!((sg.epsilon - 0.01).abs() < 1e-15);
        let full = sg.full_superoperator();
        let direct = cavity_damping(&reference()).unwrap().tensor_right(2).superoperator().add(sg.slow.superoperator());
        assert!(full.matrix().max_abs_diff(direct.matrix()) < 1e-12);
    }

    #[test]
    fn spectrum_of_the_damped_cavity() {
        let s = cavity_spectrum(&reference(), 20, 7).unwrap();
        assert_eq!(s.kernel_dim, 4);
        assert!(s.projection_error < 1e-10);
        assert!(s.ladder_error < 1e-9, "{}", s.ladder_error);
        // Coherences |0><1| decay at kappa / 2, which sets the gap.
        assert!((s.gap - 5.0).abs() < 1e-9, "{}", s.gap);
    }

    #[test]
    fn purcell_rate_is_recovered() {
        let r = purcell_check(&reference()).unwrap();
        assert!((r.gamma_measured - 4e-3).abs() < 1e-8 * 4e-3 + 1e-12, "{}", r.gamma_measured);
        assert!(r.max_entry_error < 1e-8, "{}", r.max_entry_error);
        assert!(r.cutoff_sensitivity < 1e-10, "{}", r.cutoff_sensitivity);
        assert!(r.first_order_coupling < 1e-10);
    }

    #[test]
    fn uncoupled_qubit_only_rotates() {
        let r = purcell_check(&CavityModel::new(1.0, 0.0, 10.0, 4)).unwrap();
        assert!(r.reduced.matrix().max_abs_diff(r.target.matrix()) < 1e-15);
    }

    #[test]
    fn relaxes_to_the_joint_ground_state() {
        let r = steady_state_endpoint(&CavityModel::new(1.0, 0.1, 10.0, 3)).unwrap();
        assert!(r.unique);
        assert!(r.distance < 1e-8, "{}", r.distance);
    }

    #[test]
    fn sweep_rejects_long_steps() {
        let e = cavity_ap_sweep(
            &reference(),
            &[2.0, 1.0, 0.5, 0.25],
            &[0.1, 0.03, 0.01, 0.003],
            &ResourceInputs::new(1.0, 1e-3, 1.0),
            &SweepOptions::default(),
            &crate::exec::Sequential,
        );
        assert!(matches!(e, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn two_term_fit_recovers_constants() {
        let mut pts = Vec::new();
        for eps in [0.1, 0.01, 0.001] {
            for dt in [0.1, 0.05, 0.02] {
                pts.push((eps, dt, 3.0 * eps * dt + 0.5 * dt * dt));
            }
        }
        let f = fit_two_term(&pts).unwrap();
        assert!((f.c_eps_dt - 3.0).abs() < 1e-10 && (f.c_dt2 - 0.5).abs() < 1e-10);
        assert!(f.max_relative_residual < 1e-10);
    }
}
