// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Channel distances: induced trace norm and diamond norm with certified
//! lower and upper bounds.
//!
//! For a Hermiticity-preserving map with Choi matrix `J` (output factor
//! first) the diamond norm is `max_rho ||(I (x) sqrt(rho)) J (I (x) sqrt(rho))||_1`.
//! We ascend that objective with BFGS over `rho = X X^dagger / ||X||^2` and
//! then certify the result from both sides:
//!
//! * lower: the trace norm actually achieved by the input `rho`, re-read as
//!   `Re tr(J W)` with `W = (I (x) sqrt(rho)) S (I (x) sqrt(rho))` and `S` the
//!   sign of the output;
//! * upper: a feasible dual pair `Y0, Y1 >= 0` with `Y0 - Y1 = J`, for which
//!   `lambda_max(Tr_out(Y0 + Y1))` bounds the norm from above.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{eigh, induced_trace_norm, kron, operator_norm, ComplexMatrix, Superoperator, C64};
use crate::lindblad::{partial_trace_first, Channel};
use crate::optimize::{maximize, BfgsOptions};
use crate::rng;

/// Default cap on `d^2 n` (system dimension `d`, ancilla `n = d`).
pub const DIAMOND_SIZE_CAP: usize = 64 * 64;
/// Certificates closer than this (relative to `max(1, value)`) count as converged.
pub const GAP_TOL: f64 = 1e-6;
const ZERO_MAP: f64 = 1e-14;
const HERMITIAN_CHOI_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DistanceNorm {
    Induced,
    Diamond,
}

impl DistanceNorm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Induced => "induced",
            Self::Diamond => "diamond",
        }
    }
}

/// Size of a difference map in the chosen norm. Diamond evaluations here
/// lift the size cap, since callers pick the norm deliberately.
pub fn distance(norm: DistanceNorm, m: &Superoperator) -> Result<f64> {
    match norm {
        DistanceNorm::Induced => Ok(induced_trace_norm(m).value),
        DistanceNorm::Diamond => {
            Ok(diamond_norm_with(m, &DiamondOptions { allow_large: true, ..DiamondOptions::default() })?.value)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DiamondMethod {
    SdpConverged,
    BoundSandwich,
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiamondResult {
    pub value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub method: DiamondMethod,
    pub iterations: usize,
    pub duality_gap: f64,
    /// Ancilla-side density `rho` of the best input found.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub input_density: Option<ComplexMatrix>,
}

#[derive(Clone, Copy, Debug)]
pub struct DiamondOptions {
    /// Random starts in addition to the maximally entangled one.
    pub random_starts: usize,
    pub seed: u64,
    /// Lift the Choi-dimension cap.
    pub allow_large: bool,
    pub bfgs: BfgsOptions,
}

impl Default for DiamondOptions {
    fn default() -> Self {
        Self { random_starts: 3, seed: 0x000d_1a0d, allow_large: false, bfgs: BfgsOptions::default() }
    }
}

pub fn diamond_norm(m: &Superoperator) -> Result<DiamondResult> {
    diamond_norm_with(m, &DiamondOptions::default())
}

pub fn diamond_distance(a: &Channel, b: &Channel) -> Result<DiamondResult> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(alloc::format!("channels act on {} and {}", a.dim(), b.dim())));
    }
    diamond_norm(&a.superoperator().sub(b.superoperator()))
}

pub fn diamond_norm_with(m: &Superoperator, opts: &DiamondOptions) -> Result<DiamondResult> {
    let d = m.dim();
    if d * d * d > DIAMOND_SIZE_CAP && !opts.allow_large {
        return Err(Error::SizeCap { size: d * d * d, cap: DIAMOND_SIZE_CAP });
    }
    if m.norm_fro() <= ZERO_MAP {
        return Ok(DiamondResult {
            value: 0.0,
            lower_bound: 0.0,
            upper_bound: 0.0,
            method: DiamondMethod::SdpConverged,
            iterations: 0,
            duality_gap: 0.0,
            input_density: None,
        });
    }
    let j = m.choi();
    let scale = j.norm_fro();
    if j.hermitian_deviation() > HERMITIAN_CHOI_TOL * scale.max(1.0) {
        return Ok(sandwich_only(m));
    }
    let j = j.hermitian_part();
    let objective = ChoiObjective { j: &j, d };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0;
    let mut rng = rng::stream(opts.seed, d as u64);
    for start in 0..=opts.random_starts {
        let x0 = if start == 0 { ComplexMatrix::identity(d) } else { rng::ginibre(&mut rng, d, d) };
        let r = maximize(|v| objective.value_and_gradient(v), pack(&x0), opts.bfgs);
        iterations += r.iterations;
        if best.as_ref().is_none_or(|b| r.value > b.0) {
            best = Some((r.value, r.x));
        }
    }
    let (_, xbest) = best.expect("at least one start");
    let x = unpack(&xbest, d);
    let nx = x.norm_fro();
    let rho = (&x * &x.adjoint()).scale_re(1.0 / (nx * nx)).hermitian_part();

    let lower = lower_certificate(&j, &rho, d)?;
    let upper = upper_certificate(&j, &rho, d)?;
    let gap = (upper - lower).max(0.0);
    let converged = gap <= GAP_TOL * lower.max(1.0);
    let (lower_bound, upper_bound) = if converged {
        (lower, upper)
    } else {
        let induced = induced_trace_norm(m).value;
        (lower.max(induced), upper.min(d as f64 * induced).max(lower))
    };
    Ok(DiamondResult {
        value: lower_bound,
        lower_bound,
        upper_bound,
        method: if converged { DiamondMethod::SdpConverged } else { DiamondMethod::BoundSandwich },
        iterations,
        duality_gap: (upper_bound - lower_bound).max(0.0),
        input_density: Some(rho),
    })
}

fn sandwich_only(m: &Superoperator) -> DiamondResult {
    let induced = induced_trace_norm(m).value;
    let upper = m.dim() as f64 * induced;
    DiamondResult {
        value: induced,
        lower_bound: induced,
        upper_bound: upper,
        method: DiamondMethod::BoundSandwich,
        iterations: 0,
        duality_gap: upper - induced,
        input_density: None,
    }
}

fn pack(x: &ComplexMatrix) -> Vec<f64> {
    x.data().iter().map(|z| z.re).chain(x.data().iter().map(|z| z.im)).collect()
}

fn unpack(v: &[f64], d: usize) -> ComplexMatrix {
    let n = d * d;
    let data = (0..n).map(|k| C64::new(v[k], v[n + k])).collect();
    ComplexMatrix::from_col_major(d, d, data).expect("length matches")
}

fn lift(d: usize, x: &ComplexMatrix) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(d), x)
}

/// `F(X) = ||(I (x) X^dagger) J (I (x) X)||_1 / ||X||_F^2`.
struct ChoiObjective<'a> {
    j: &'a ComplexMatrix,
    d: usize,
}

impl ChoiObjective<'_> {
    fn value_and_gradient(&self, v: &[f64]) -> (f64, Vec<f64>) {
        let x = unpack(v, self.d);
        let nx = x.norm_fro() * x.norm_fro();
        if !(nx > 0.0) {
            return (f64::NEG_INFINITY, alloc::vec![0.0; v.len()]);
        }
        let ix = lift(self.d, &x);
        let jx = self.j * &ix;
        let out = (&ix.adjoint() * &jx).hermitian_part();
        let Ok(e) = eigh(&out) else {
            return (f64::NEG_INFINITY, alloc::vec![0.0; v.len()]);
        };
        let f: f64 = e.values.iter().map(|l| l.abs()).sum();
        let sign = e.map_values(sign_of);
        // d||M||_1 = 2 Re tr(G^dagger dX) with G = Tr_out(J (I (x) X) S).
        let g = partial_trace_first(&(&jx * &sign), self.d, self.d).scale_re(2.0);
        let value = f / nx;
        let grad = (&g - &x.scale_re(2.0 * value)).scale_re(1.0 / nx);
        (value, pack(&grad))
    }
}

fn sign_of(l: f64) -> f64 {
    if l > 0.0 {
        1.0
    } else if l < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `Re tr(J W)` for the primal witness built from `rho`.
fn lower_certificate(j: &ComplexMatrix, rho: &ComplexMatrix, d: usize) -> Result<f64> {
    let root = lift(d, &eigh(rho)?.map_values(|l| libm::sqrt(l.max(0.0))));
    let out = (&(&root * j) * &root).hermitian_part();
    let sign = eigh(&out)?.map_values(sign_of);
    let w = &(&root * &sign) * &root;
    Ok((j * &w).trace().re)
}

/// Smallest dual objective over a ladder of regularized `rho`.
fn upper_certificate(j: &ComplexMatrix, rho: &ComplexMatrix, d: usize) -> Result<f64> {
    let mut best = f64::INFINITY;
    let mixed = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
    for k in 0..=10 {
        let eta = libm::pow(10.0, -14.0 + k as f64);
        let r = &rho.scale_re(1.0 - eta) + &mixed.scale_re(eta);
        if let Ok(bound) = dual_bound(j, &r, d) {
            best = best.min(bound);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::NoConvergence { what: "diamond dual certificate", iterations: 11 })
    }
}

/// Dual objective of `Y0 = A M+ A`, `Y1 = A M- A` with `A = I (x) rho^{-1/2}`
/// and `M = (I (x) sqrt(rho)) J (I (x) sqrt(rho))`. Rounding is absorbed
/// explicitly: the residual `J - (Y0 - Y1)` and any negative eigenvalue of
/// `Y0` or `Y1` are paid for with operator-norm terms, so the returned number
/// is a valid bound for the true `J`.
fn dual_bound(j: &ComplexMatrix, rho: &ComplexMatrix, d: usize) -> Result<f64> {
    let er = eigh(rho)?;
    if er.min() <= 0.0 {
        return Err(Error::Singular);
    }
    let root = lift(d, &er.map_values(libm::sqrt));
    let inv_root = lift(d, &er.map_values(|l| 1.0 / libm::sqrt(l)));
    let m = (&(&root * j) * &root).hermitian_part();
    let em = eigh(&m)?;
    let pos = em.map_values(|l| l.max(0.0));
    let neg = em.map_values(|l| (-l).max(0.0));
    let y0 = (&(&inv_root * &pos) * &inv_root).hermitian_part();
    let y1 = (&(&inv_root * &neg) * &inv_root).hermitian_part();
    let residual = j - &(&y0 - &y1);
    let shift = 0f64.max(-eigh(&y0)?.min()).max(-eigh(&y1)?.min());
    let tr = partial_trace_first(&(&y0 + &y1), d, d);
    let top = eigh(&tr)?.max();
    let bound = top + 2.0 * d as f64 * (shift + operator_norm(&residual)?);
    if bound.is_finite() {
        Ok(bound)
    } else {
        Err(Error::NonFinite { row: 0, col: 0 })
    }
}

/// Closed form `lambda_max(Tr_out J)`; equals the diamond norm of a
/// completely positive map.
pub fn completely_positive_value(m: &Superoperator) -> Result<f64> {
    let j = m.choi().hermitian_part();
    Ok(eigh(&partial_trace_first(&j, m.dim(), m.dim()))?.max())
}

/// Pure input `|psi>` on system (x) ancilla achieving the lower bound:
/// `psi = vec(sqrt(rho)) / ||.||`, so that `(m (x) I)(|psi><psi|)` has trace
/// norm equal to the certified value.
pub fn optimal_input(result: &DiamondResult) -> Option<ComplexMatrix> {
    let rho = result.input_density.as_ref()?;
    let root = eigh(rho).ok()?.map_values(|l| libm::sqrt(l.max(0.0)));
    let n = root.norm_fro();
    let psi: Vec<C64> = root.data().iter().map(|z| z / n).collect();
    Some(ComplexMatrix::outer(&psi, &psi))
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SandwichReport {
    pub induced: f64,
    pub diamond: f64,
    pub dim_times_induced: f64,
    pub holds: bool,
}

/// `||m|| <= diamond(m) <= d ||m||` with `1e-8` slack.
pub fn norm_sandwich_check(m: &Superoperator) -> Result<SandwichReport> {
    let induced = induced_trace_norm(m).value;
    let diamond = diamond_norm(m)?;
    let top = m.dim() as f64 * induced;
    let slack = 1e-8;
    Ok(SandwichReport {
        induced,
        diamond: diamond.value,
        dim_times_induced: top,
        holds: induced <= diamond.upper_bound + slack && diamond.lower_bound <= top + slack,
    })
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StabilityReport {
    pub ancilla: usize,
    pub base: f64,
    pub enlarged: f64,
    pub difference: f64,
    pub holds: bool,
}

/// Compare `diamond(m (x) I_n)`, computed on the enlarged space, with
/// `diamond(m)`.
pub fn stability_check(m: &Superoperator, n: usize) -> Result<StabilityReport> {
    stability_check_with(m, n, &DiamondOptions::default())
}

pub fn stability_check_with(m: &Superoperator, n: usize, opts: &DiamondOptions) -> Result<StabilityReport> {
    let size = (m.dim() * n).pow(3);
    if size > DIAMOND_SIZE_CAP && !opts.allow_large {
        return Err(Error::SizeCap { size, cap: DIAMOND_SIZE_CAP });
    }
    let base = diamond_norm_with(m, opts)?.value;
    let enlarged = diamond_norm_with(&m.tensor_identity(n), &DiamondOptions { allow_large: true, ..*opts })?.value;
    let difference = (enlarged - base).abs();
    Ok(StabilityReport { ancilla: n, base, enlarged, difference, holds: difference <= 1e-5 })
}
