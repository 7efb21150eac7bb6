// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! The `(eps, dt)` verification grid: per-cell errors, the split of the
//! consistency error into layer contributions, and the fitted orders.

use alloc::format;
use alloc::vec::Vec;

use super::{build_step, slow_layer, ErrorReport, Mode, ProtocolConfig};
use crate::elimination::{effective_generator, EffectiveGenerator, StiffGenerator};
use crate::error::{Error, Result};
use crate::exec::CellExecutor;
use crate::fit::{non_increasing, power_law, weighted_line, LineFit};
use crate::linalg::Superoperator;
use crate::metrics::{self, DistanceNorm};

/// Grids shorter than this cannot be fitted.
pub const MIN_GRID_POINTS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepOptions {
    /// Number of cells, spread over the grid, re-measured in the diamond norm.
    pub diamond_spots: usize,
    /// Solver floor used to down-weight the smallest samples of a fit.
    pub fit_floor: f64,
    /// Slack allowed in the monotonicity of the diagram distance.
    pub monotone_noise: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { diamond_spots: 4, fit_floor: 1e-12, monotone_noise: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepCell {
    pub eps: f64,
    pub dt: f64,
    pub norm: DistanceNorm,
    pub errors: ErrorReport,
    /// `||Psi^eps_dt - Psi^0_dt||`, the protocol against its own `eps -> 0` limit.
    pub diagram_distance: f64,
    /// Used by the eps fit (smallest dt column).
    pub in_eps_fit: bool,
    /// Used by the dt fit (smallest eps row).
    pub in_dt_fit: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpotCheck {
    pub eps: f64,
    pub dt: f64,
    pub induced: f64,
    pub diamond: f64,
    /// `max(diamond / induced, induced / diamond)`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ApFits {
    /// dt-slope of the consistency error minus one, at the smallest eps.
    pub p: f64,
    /// The same, row by row.
    pub p_by_eps: Vec<f64>,
    /// dt-exponent of the eps-linear part of the asymptotic error, taken from
    /// the difference of the two largest-eps rows.
    pub q: Option<f64>,
    /// eps-slope of the asymptotic error at the smallest dt; `None` when the
    /// errors vanish (nothing to fit).
    pub eps_slope: Option<LineFit>,
    /// dt-slope of the asymptotic error at the smallest eps.
    pub dt_slope: Option<LineFit>,
    /// `max_dt consistency / dt^(p+1)` per eps.
    pub c1_by_eps: Vec<f64>,
    /// `max_dt ||Psi^eps - Psi^0||` per eps.
    pub diagram_max: Vec<f64>,
    pub diagram_monotone: bool,
    pub triangle_holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepReport {
    pub mode: Mode,
    pub norm: DistanceNorm,
    pub eps_grid: Vec<f64>,
    pub dt_grid: Vec<f64>,
    /// Row-major: eps outer, dt inner.
    pub cells: Vec<SweepCell>,
    pub fits: ApFits,
    pub spot_checks: Vec<SpotCheck>,
}

impl SweepReport {
    pub fn cell(&self, ie: usize, idt: usize) -> &SweepCell {
        &self.cells[ie * self.dt_grid.len() + idt]
    }
}

fn check_grid(name: &str, g: &[f64]) -> Result<()> {
    if g.len() < MIN_GRID_POINTS {
        return Err(Error::Fit(format!("{name} grid has {} points, need at least {MIN_GRID_POINTS}", g.len())));
    }
    if g.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter(format!("{name} grid must be positive and finite")));
    }
    let mut s: Vec<f64> = g.to_vec();
    s.sort_by(f64::total_cmp);
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Fit(format!("{name} grid has repeated points")));
    }
    Ok(())
}

fn argmin(g: &[f64]) -> usize {
    (0..g.len()).min_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap_or(0)
}

/// `Psi^0_dt`: the step with the fast layer replaced by its limit `P`.
fn limit_step(sg: &StiffGenerator, cfg: &ProtocolConfig, eff0: &EffectiveGenerator, dt: f64) -> Result<Superoperator> {
    let p = sg.projection();
    match cfg.mode {
        Mode::StandardTrotter => {
            let s = sg.slow.superoperator().exp(dt)?;
            Ok(if cfg.trotter_order == 1 { p.compose(&s) } else { p.compose(&s).compose(p) })
        }
        Mode::LayeredAnalog | Mode::LayeredDigital => Ok(slow_layer(sg, dt, cfg.slow_order)?.compose(p)),
        Mode::EffectiveOnly => eff0.propagator(dt),
    }
}

struct Prepared {
    sg: StiffGenerator,
    eff: EffectiveGenerator,
}

/// Measure a protocol over the `(eps, dt)` grid and fit its AP constants.
pub fn ap_verify<E: CellExecutor>(
    sg: &StiffGenerator,
    template: &ProtocolConfig,
    eps_grid: &[f64],
    dt_grid: &[f64],
    norm: DistanceNorm,
    opts: &SweepOptions,
    exec: &E,
) -> Result<SweepReport> {
    check_grid("eps", eps_grid)?;
    check_grid("dt", dt_grid)?;
    let prepared: Vec<Result<Prepared>> = exec.map(eps_grid.len(), |i| {
        let s = sg.with_epsilon(eps_grid[i])?;
        let eff = effective_generator(&s)?;
        Ok(Prepared { sg: s, eff })
    });
    let prepared: Vec<Prepared> = prepared.into_iter().collect::<Result<_>>()?;
    // The eps -> 0 limit of the effective generator drops the second-order term.
    let mut eff0 = prepared[0].eff.clone();
    eff0.superoperator = eff0.first_order.clone();
    eff0.epsilon = 0.0;

    let nd = dt_grid.len();
    let ie_min = argmin(eps_grid);
    let idt_min = argmin(dt_grid);
    let raw: Vec<Result<SweepCell>> = exec.map(eps_grid.len() * nd, |k| {
        let (ie, idt) = (k / nd, k % nd);
        let Prepared { sg: s, eff } = &prepared[ie];
        let dt = dt_grid[idt];
        let mut cfg = *template;
        cfg.dt = dt;
        cfg.total_time = cfg.total_time.max(dt);
        let step = build_step(s, &cfg, dt, Some(eff))?;
        let exact = s.full_superoperator().exp(dt)?;
        let d = |m: &Superoperator| metrics::distance(norm, m);
        let consistency_err = d(&step.map.sub(&exact))?;
        let asymptotic_err = d(&step.map.sub(&eff.propagator(dt)?))?;
        let (slow_err, fast_err, interaction_err) = match cfg.mode {
            Mode::LayeredAnalog | Mode::LayeredDigital => {
                let es = s.slow.superoperator().exp(dt)?;
                let ef = s.fast.superoperator().scale(1.0 / s.epsilon).exp(dt)?;
                (
                    d(&step.slow.sub(&es).compose(&step.fast))?,
                    d(&es.compose(&step.fast.sub(&ef)))?,
                    d(&es.compose(&ef).sub(&exact))?,
                )
            }
            Mode::StandardTrotter | Mode::EffectiveOnly => (0.0, 0.0, consistency_err),
        };
        let diagram_distance = d(&step.map.sub(&limit_step(s, &cfg, &eff0, dt)?))?;
        Ok(SweepCell {
            eps: s.epsilon,
            dt,
            norm,
            errors: ErrorReport { consistency_err, asymptotic_err, slow_err, fast_err, interaction_err },
            diagram_distance,
            in_eps_fit: idt == idt_min,
            in_dt_fit: ie == ie_min,
        })
    });
    let cells: Vec<SweepCell> = raw.into_iter().collect::<Result<_>>()?;

    let fits = fit_cells(eps_grid, dt_grid, &cells, opts)?;
    let spot_checks = spot_check(&prepared, template, dt_grid, &cells, opts, exec)?;
    Ok(SweepReport {
        mode: template.mode,
        norm,
        eps_grid: eps_grid.to_vec(),
        dt_grid: dt_grid.to_vec(),
        cells,
        fits,
        spot_checks,
    })
}

fn fit_cells(eps_grid: &[f64], dt_grid: &[f64], cells: &[SweepCell], opts: &SweepOptions) -> Result<ApFits> {
    let nd = dt_grid.len();
    let row = |ie: usize| &cells[ie * nd..(ie + 1) * nd];
    let ie_min = argmin(eps_grid);
    let idt_min = argmin(dt_grid);
    let floor = opts.fit_floor;

    let mut p_by_eps = Vec::with_capacity(eps_grid.len());
    let mut c1_by_eps = Vec::with_capacity(eps_grid.len());
    for ie in 0..eps_grid.len() {
        let ys: Vec<f64> = row(ie).iter().map(|c| c.errors.consistency_err).collect();
        let p = power_law(dt_grid, &ys, floor).map(|f| f.slope - 1.0).unwrap_or(f64::NAN);
        let c1 = if p.is_finite() {
            dt_grid.iter().zip(&ys).map(|(&dt, &y)| y / libm::pow(dt, p + 1.0)).fold(0.0, f64::max)
        } else {
            f64::NAN
        };
        p_by_eps.push(p);
        c1_by_eps.push(c1);
    }

    let eps_col: Vec<f64> = (0..eps_grid.len()).map(|ie| cells[ie * nd + idt_min].errors.asymptotic_err).collect();
    let eps_slope = power_law(eps_grid, &eps_col, floor).ok();
    let dt_row: Vec<f64> = row(ie_min).iter().map(|c| c.errors.asymptotic_err).collect();
    let dt_slope = power_law(dt_grid, &dt_row, floor).ok();

    // The eps dt^q part, isolated by differencing the two largest eps.
    let mut order: Vec<usize> = (0..eps_grid.len()).collect();
    order.sort_by(|&a, &b| eps_grid[b].total_cmp(&eps_grid[a]));
    let (a, b) = (order[0], order[1]);
    let quotient: Vec<f64> = (0..nd)
        .map(|j| (row(a)[j].errors.asymptotic_err - row(b)[j].errors.asymptotic_err) / (eps_grid[a] - eps_grid[b]))
        .collect();
    let q = if quotient.iter().all(|&x| x > 0.0) {
        let lx: Vec<f64> = dt_grid.iter().map(|&x| libm::log(x)).collect();
        let ly: Vec<f64> = quotient.iter().map(|&x| libm::log(x)).collect();
        weighted_line(&lx, &ly, &alloc::vec![1.0; nd]).ok().map(|f| f.slope)
    } else {
        None
    };

    let mut diagram_max: Vec<(f64, f64)> = (0..eps_grid.len())
        .map(|ie| (eps_grid[ie], row(ie).iter().map(|c| c.diagram_distance).fold(0.0, f64::max)))
        .collect();
    diagram_max.sort_by(|x, y| y.0.total_cmp(&x.0));
    let along: Vec<f64> = diagram_max.iter().map(|x| x.1).collect();
    let diagram_monotone = non_increasing(&along, opts.monotone_noise);
    let diagram_max =
        (0..eps_grid.len()).map(|ie| row(ie).iter().map(|c| c.diagram_distance).fold(0.0, f64::max)).collect();

    Ok(ApFits {
        p: p_by_eps[ie_min],
        p_by_eps,
        q,
        eps_slope,
        dt_slope,
        c1_by_eps,
        diagram_max,
        diagram_monotone,
        triangle_holds: cells.iter().all(|c| c.errors.triangle_holds()),
    })
}

/// Re-measure the asymptotic error in the diamond norm on `diamond_spots`
/// cells spread along the grid diagonal and its corners.
fn spot_check<E: CellExecutor>(
    prepared: &[Prepared],
    template: &ProtocolConfig,
    dt_grid: &[f64],
    cells: &[SweepCell],
    opts: &SweepOptions,
    exec: &E,
) -> Result<Vec<SpotCheck>> {
    let n = cells.len();
    let want = opts.diamond_spots.min(n);
    if want == 0 {
        return Ok(Vec::new());
    }
    let mut picks: Vec<usize> = (0..want).map(|k| if want == 1 { 0 } else { k * (n - 1) / (want - 1) }).collect();
    picks.dedup();
    let nd = dt_grid.len();
    let out: Vec<Result<SpotCheck>> = exec.map(picks.len(), |k| {
        let idx = picks[k];
        let Prepared { sg: s, eff } = &prepared[idx / nd];
        let dt = dt_grid[idx % nd];
        let mut cfg = *template;
        cfg.dt = dt;
        cfg.total_time = cfg.total_time.max(dt);
        let step = build_step(s, &cfg, dt, Some(eff))?;
        let diff = step.map.sub(&eff.propagator(dt)?);
        let induced = metrics::distance(DistanceNorm::Induced, &diff)?;
        let diamond = metrics::distance(DistanceNorm::Diamond, &diff)?;
        let ratio = if induced > 0.0 && diamond > 0.0 {
            (diamond / induced).max(induced / diamond)
        } else if induced == diamond {
            1.0
        } else {
            f64::INFINITY
        };
        Ok(SpotCheck { eps: s.epsilon, dt, induced, diamond, ratio })
    });
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::linalg::{kron, ComplexMatrix};
    use crate::lindblad::{ops, LindbladGenerator};
    use alloc::vec;

    /// Damped mode (fast) coupled by exchange to a qubit (slow).
    fn exchange(eps: f64) -> StiffGenerator {
        let fast =
            LindbladGenerator::new(ComplexMatrix::zeros(2, 2), vec![ops::sigma_minus()]).unwrap().tensor_right(2);
        let h = kron(&ops::sigma_plus(), &ops::sigma_minus());
        let h = &h + &h.adjoint();
        let hq = kron(&ComplexMatrix::identity(2), &ops::pauli_z()).scale_re(0.25);
        let slow = LindbladGenerator::new(&h.scale_re(0.3) + &hq, vec![]).unwrap();
        StiffGenerator::new(fast, slow, eps).unwrap()
    }

    const EPS: [f64; 4] = [1e-1, 3e-2, 1e-2, 3e-3];
    const DT: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

    #[test]
    fn short_grid_is_rejected() {
        let cfg = ProtocolConfig::new(Mode::LayeredAnalog, 0.1, 1.0);
        let r = ap_verify(
            &exchange(0.1),
            &cfg,
            &EPS[..3],
            &DT,
            DistanceNorm::Induced,
            &SweepOptions::default(),
            &Sequential,
        );
        assert!(matches!(r, Err(Error::Fit(_))));
    }

    #[test]
    fn layered_analog_is_asymptotic_preserving() {
        let cfg = ProtocolConfig::new(Mode::LayeredAnalog, 0.1, 1.0);
        let opts = SweepOptions { diamond_spots: 0, ..Default::default() };
        let r = ap_verify(&exchange(0.1), &cfg, &EPS, &DT, DistanceNorm::Induced, &opts, &Sequential).unwrap();
        assert_eq!(r.cells.len(), 16);
        assert!(r.fits.triangle_holds);
        assert!(r.fits.diagram_monotone, "{:?}", r.fits.diagram_max);
        let slope = r.fits.eps_slope.as_ref().unwrap().slope;
        assert!((slope - 1.0).abs() < 0.3, "{slope}");
        let last = r.fits.diagram_max[3];
        assert!(last < r.fits.diagram_max[0]);
    }

    #[test]
    fn effective_only_has_no_eps_dependence_in_the_limit_error() {
        let cfg = ProtocolConfig::new(Mode::EffectiveOnly, 0.1, 1.0);
        let opts = SweepOptions { diamond_spots: 0, ..Default::default() };
        let r = ap_verify(&exchange(0.1), &cfg, &EPS, &DT, DistanceNorm::Induced, &opts, &Sequential).unwrap();
        assert!(r.cells.iter().all(|c| c.errors.asymptotic_err < 1e-12));
        assert!(r.fits.eps_slope.is_none());
    }
}
