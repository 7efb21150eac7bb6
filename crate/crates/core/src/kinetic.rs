// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Discrete-velocity BGK model in hyperbolic scaling on a periodic interval,
//!
//! `f_t + v f_x = (M[f] - f) / eps`,
//!
//! with an asymptotic-preserving IMEX step (explicit upwind transport, then
//! backward-Euler relaxation, which is explicit here because relaxation
//! conserves the moments `M` depends on) and the fluid scheme it reduces to
//! as `eps -> 0`.
//!
//! Two velocity sets are provided. The two-velocity set `v = +-1` relaxes to
//! `M = rho (1 +- a) / 2` and conserves mass only; its fluid limit is
//! `rho_t + a rho_x = eps (1 - a^2) rho_xx`. The Gauss-Hermite set relaxes
//! to a discrete Maxwellian that conserves mass, momentum and energy.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exec::CellExecutor;
use crate::fit::{power_law, LineFit};
use crate::linalg::{eigh, ComplexMatrix, C64};

/// Largest admissible `dt max|v| / dx`.
pub const CFL: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields))]
pub enum VelocitySet {
    /// `v = +-1` relaxing toward the drift `a`, `|a| < 1`.
    TwoVelocity { drift: f64 },
    /// Probabilists' Gauss-Hermite nodes and weights.
    GaussHermite { points: usize },
}

#[derive(Clone, Debug)]
pub struct Velocities {
    pub set: VelocitySet,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

/// Nodes and weights of the `n`-point rule for `exp(-v^2/2) / sqrt(2 pi)`,
/// from the eigenpairs of its Jacobi matrix.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one node".into()));
    }
    let j = ComplexMatrix::from_fn(n, n, |r, c| {
        if r + 1 == c || c + 1 == r {
            C64::new(libm::sqrt(r.max(c) as f64), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let e = eigh(&j)?;
    let w = (0..n).map(|k| e.vectors[(0, k)].norm_sqr()).collect();
    Ok((e.values, w))
}

impl Velocities {
    pub fn new(set: VelocitySet) -> Result<Self> {
        match set {
            VelocitySet::TwoVelocity { drift } => {
                if !(drift.abs() < 1.0) {
                    return Err(Error::InvalidParameter(format!("drift must satisfy |a| < 1, got {drift}")));
                }
                Ok(Self { set, v: vec![1.0, -1.0], w: vec![1.0, 1.0] })
            }
            VelocitySet::GaussHermite { points } => {
                if points < 4 {
                    return Err(Error::InvalidParameter("Gauss-Hermite set needs at least 4 points".into()));
                }
                let (v, w) = gauss_hermite(points)?;
                Ok(Self { set, v, w })
            }
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn max_speed(&self) -> f64 {
        self.v.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Number of conserved moments.
    pub fn moment_count(&self) -> usize {
        match self.set {
            VelocitySet::TwoVelocity { .. } => 1,
            VelocitySet::GaussHermite { .. } => 3,
        }
    }

    /// Conserved moments of one cell: `rho`, or `(rho, rho u, rho (u^2 + T))`.
    fn moments(&self, f: impl Fn(usize) -> f64) -> [f64; 3] {
        let mut m = [0.0; 3];
        for j in 0..self.len() {
            let wf = self.w[j] * f(j);
            m[0] += wf;
            m[1] += wf * self.v[j];
            m[2] += wf * self.v[j] * self.v[j];
        }
        m
    }

    /// Equilibrium values `M_j` for the conserved moments `m`.
    fn equilibrium(&self, m: [f64; 3], cell: usize, out: &mut [f64]) -> Result<()> {
        let rho = m[0];
        if !(rho >= 0.0) {
            return Err(Error::NegativeDensity { cell });
        }
        match self.set {
            VelocitySet::TwoVelocity { drift } => {
                out[0] = 0.5 * rho * (1.0 + drift);
                out[1] = 0.5 * rho * (1.0 - drift);
            }
            VelocitySet::GaussHermite { .. } => {
                if rho == 0.0 {
                    out.iter_mut().for_each(|x| *x = 0.0);
                    return Ok(());
                }
                let u = m[1] / rho;
                let t = m[2] / rho - u * u;
                if !(t > 0.0) {
                    return Err(Error::NegativeDensity { cell });
                }
                // Second-order Hermite expansion; the rule integrates it
                // exactly, so all three moments are reproduced.
                for (j, o) in out.iter_mut().enumerate() {
                    let v = self.v[j];
                    *o = rho * (1.0 + u * v + 0.5 * (u * u + t - 1.0) * (v * v - 1.0));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct KineticState {
    pub nx: usize,
    pub dx: f64,
    pub epsilon: f64,
    /// Velocity-major: `f[j * nx + i]`.
    pub f: Vec<f64>,
}

impl KineticState {
    pub fn value(&self, j: usize, i: usize) -> f64 {
        self.f[j * self.nx + i]
    }

    /// Zeroth moment per cell.
    pub fn density(&self, vel: &Velocities) -> Vec<f64> {
        (0..self.nx).map(|i| vel.moments(|j| self.value(j, i))[0]).collect()
    }

    /// `sum_j w_j sum_i f dx`.
    pub fn mass(&self, vel: &Velocities) -> f64 {
        self.density(vel).iter().sum::<f64>() * self.dx
    }

    pub fn momentum(&self, vel: &Velocities) -> f64 {
        (0..self.nx).map(|i| vel.moments(|j| self.value(j, i))[1]).sum::<f64>() * self.dx
    }

    pub fn max_abs(&self) -> f64 {
        self.f.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Local equilibrium of smooth periodic data on `[0, 1)`: density
/// `1 + amplitude sin(2 pi x)`, and for the Gauss-Hermite set zero mean
/// velocity and unit temperature.
pub fn smooth_equilibrium(vel: &Velocities, nx: usize, epsilon: f64, amplitude: f64) -> Result<KineticState> {
    let dx = 1.0 / nx as f64;
    let nv = vel.len();
    let mut f = vec![0.0; nx * nv];
    let mut m = vec![0.0; nv];
    for i in 0..nx {
        let x = (i as f64 + 0.5) * dx;
        let rho = 1.0 + amplitude * libm::sin(2.0 * core::f64::consts::PI * x);
        vel.equilibrium([rho, 0.0, rho], i, &mut m)?;
        for j in 0..nv {
            f[j * nx + i] = m[j];
        }
    }
    Ok(KineticState { nx, dx, epsilon, f })
}

/// `Q(f) = M[f] - f`, cell by cell.
pub fn bgk_collision(vel: &Velocities, s: &KineticState) -> Result<Vec<f64>> {
    let nv = vel.len();
    let mut q = vec![0.0; s.f.len()];
    let mut m = vec![0.0; nv];
    for i in 0..s.nx {
        vel.equilibrium(vel.moments(|j| s.value(j, i)), i, &mut m)?;
        for j in 0..nv {
            q[j * s.nx + i] = m[j] - s.value(j, i);
        }
    }
    Ok(q)
}

fn check_cfl(vel: &Velocities, dx: f64, dt: f64) -> Result<()> {
    let limit = CFL * dx / vel.max_speed();
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, limit });
    }
    Ok(())
}

/// First-order upwind transport over `dt`, periodic.
fn transport(vel: &Velocities, nx: usize, dx: f64, dt: f64, f: &[f64], out: &mut [f64]) {
    for (j, &v) in vel.v.iter().enumerate() {
        let lam = dt * v / dx;
        let row = &f[j * nx..(j + 1) * nx];
        let dst = &mut out[j * nx..(j + 1) * nx];
        for i in 0..nx {
            let (l, r) = ((i + nx - 1) % nx, (i + 1) % nx);
            dst[i] = if v >= 0.0 { row[i] - lam * (row[i] - row[l]) } else { row[i] - lam * (row[r] - row[i]) };
        }
    }
}

/// How the relaxation is integrated after transport.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Relaxation {
    /// One backward-Euler step `(eps f + dt M) / (eps + dt)`.
    Implicit,
    /// `N = ceil(dt / eps)` forward substeps of length `dt / N`.
    Layered,
}

/// One transport-then-relax step.
pub fn imex_step(vel: &Velocities, s: &KineticState, dt: f64, relaxation: Relaxation) -> Result<KineticState> {
    check_cfl(vel, s.dx, dt)?;
    let nx = s.nx;
    let nv = vel.len();
    let mut star = vec![0.0; s.f.len()];
    transport(vel, nx, s.dx, dt, &s.f, &mut star);
    let mut m = vec![0.0; nv];
    let eps = s.epsilon;
    let (n, h) = match relaxation {
        Relaxation::Implicit => (1, dt),
        Relaxation::Layered => {
            let n = libm::ceil(dt / eps - 1e-12).max(1.0);
            (n as usize, dt / n)
        }
    };
    for i in 0..nx {
        // Relaxation leaves the moments unchanged, so M is fixed over the step.
        vel.equilibrium(vel.moments(|j| star[j * nx + i]), i, &mut m)?;
        for j in 0..nv {
            let x = &mut star[j * nx + i];
            match relaxation {
                Relaxation::Implicit => *x = (eps * *x + h * m[j]) / (eps + h),
                Relaxation::Layered => {
                    let keep = 1.0 - h / eps;
                    let mut y = *x;
                    for _ in 0..n {
                        y = keep * y + (h / eps) * m[j];
                    }
                    *x = y;
                }
            }
        }
    }
    Ok(KineticState { nx, dx: s.dx, epsilon: eps, f: star })
}

/// Fluid variables: the conserved moments of each cell, moment-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FluidState {
    pub nx: usize,
    pub dx: f64,
    pub moments: Vec<[f64; 3]>,
}

pub fn project(vel: &Velocities, s: &KineticState) -> FluidState {
    FluidState { nx: s.nx, dx: s.dx, moments: (0..s.nx).map(|i| vel.moments(|j| s.value(j, i))).collect() }
}

/// Closure used by the fluid stepper.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FluidClosure {
    /// The `eps -> 0` limit of the kinetic step: transport the local
    /// equilibrium, take moments.
    Limit,
    /// The limit plus the viscous correction `eps (1 - a^2) rho_xx`,
    /// integrated implicitly (two-velocity set only).
    Viscous,
}

/// One fluid step of length `dt`.
pub fn fluid_step(
    vel: &Velocities,
    u: &FluidState,
    dt: f64,
    epsilon: f64,
    closure: FluidClosure,
) -> Result<FluidState> {
    check_cfl(vel, u.dx, dt)?;
    let (nx, nv) = (u.nx, vel.len());
    let mut eq = vec![0.0; nx * nv];
    let mut m = vec![0.0; nv];
    for (i, mom) in u.moments.iter().enumerate() {
        vel.equilibrium(*mom, i, &mut m)?;
        for j in 0..nv {
            eq[j * nx + i] = m[j];
        }
    }
    let mut moved = vec![0.0; eq.len()];
    transport(vel, nx, u.dx, dt, &eq, &mut moved);
    let mut out: Vec<[f64; 3]> = (0..nx).map(|i| vel.moments(|j| moved[j * nx + i])).collect();
    if closure == FluidClosure::Viscous {
        let drift = match vel.set {
            VelocitySet::TwoVelocity { drift } => drift,
            VelocitySet::GaussHermite { .. } => {
                return Err(Error::InvalidParameter("viscous closure is defined for the two-velocity set".into()))
            }
        };
        let nu = epsilon * (1.0 - drift * drift);
        let rho: Vec<f64> = out.iter().map(|x| x[0]).collect();
        let r = nu * dt / (u.dx * u.dx);
        let solved = periodic_tridiagonal(-r, 1.0 + 2.0 * r, -r, &rho)?;
        for (o, v) in out.iter_mut().zip(solved) {
            o[0] = v;
        }
    }
    Ok(FluidState { nx, dx: u.dx, moments: out })
}

/// Solve the circulant system with rows `(lo, diag, hi)` by the
/// Sherman-Morrison correction of the Thomas algorithm.
fn periodic_tridiagonal(lo: f64, diag: f64, hi: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    if n < 3 {
        return Err(Error::Dimension("periodic solve needs at least 3 cells".into()));
    }
    if lo == 0.0 && hi == 0.0 {
        return Ok(rhs.iter().map(|x| x / diag).collect());
    }
    let gamma = -diag;
    let mut d = vec![diag; n];
    d[0] = diag - gamma;
    d[n - 1] = diag - lo * hi / gamma;
    let thomas = |b: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        c[0] = hi / d[0];
        x[0] = b[0] / d[0];
        for i in 1..n {
            let den = d[i] - lo * c[i - 1];
            c[i] = hi / den;
            x[i] = (b[i] - lo * x[i - 1]) / den;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    };
    let y = thomas(rhs);
    let mut uvec = vec![0.0; n];
    uvec[0] = gamma;
    uvec[n - 1] = lo;
    let z = thomas(&uvec);
    let fact = (y[0] + hi * y[n - 1] / gamma) / (1.0 + z[0] + hi * z[n - 1] / gamma);
    Ok(y.iter().zip(&z).map(|(a, b)| a - fact * b).collect())
}

/// Discrete `L^2` norm of the density difference.
pub fn l2_density(a: &[f64], b: &[f64], dx: f64) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() * dx)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct KineticParams {
    pub velocities: VelocitySet,
    pub nx: usize,
    pub total_time: f64,
    pub amplitude: f64,
    pub relaxation: Relaxation,
    pub closure: FluidClosure,
    /// The resolved reference runs at `min(dt_grid) / reference_refinement`.
    pub reference_refinement: usize,
}

impl Default for KineticParams {
    fn default() -> Self {
        Self {
            velocities: VelocitySet::TwoVelocity { drift: 0.5 },
            nx: 200,
            total_time: 0.1,
            amplitude: 0.5,
            relaxation: Relaxation::Implicit,
            closure: FluidClosure::Limit,
            reference_refinement: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KineticRun {
    pub steps: usize,
    pub dt_effective: f64,
    pub density: Vec<f64>,
    /// Largest relative mass change over a single step.
    pub mass_drift: f64,
    pub momentum_drift: f64,
    pub max_f: f64,
}

/// `ceil(T / dt)` kinetic steps of length `T / n`.
pub fn run_kinetic(vel: &Velocities, p: &KineticParams, epsilon: f64, dt: f64) -> Result<KineticRun> {
    let mut s = smooth_equilibrium(vel, p.nx, epsilon, p.amplitude)?;
    let n = libm::ceil(p.total_time / dt - 1e-9).max(1.0) as usize;
    let h = p.total_time / n as f64;
    let mut mass = s.mass(vel);
    let mut mom = s.momentum(vel);
    let (mut mass_drift, mut momentum_drift, mut max_f): (f64, f64, f64) = (0.0, 0.0, s.max_abs());
    for _ in 0..n {
        s = imex_step(vel, &s, h, p.relaxation)?;
        let (m, q) = (s.mass(vel), s.momentum(vel));
        mass_drift = mass_drift.max((m - mass).abs() / mass.abs().max(f64::MIN_POSITIVE));
        momentum_drift = momentum_drift.max((q - mom).abs());
        max_f = max_f.max(s.max_abs());
        mass = m;
        mom = q;
    }
    Ok(KineticRun { steps: n, dt_effective: h, density: s.density(vel), mass_drift, momentum_drift, max_f })
}

/// Fluid run from the projected initial data.
pub fn run_fluid(vel: &Velocities, p: &KineticParams, epsilon: f64, dt: f64) -> Result<Vec<f64>> {
    let s = smooth_equilibrium(vel, p.nx, epsilon, p.amplitude)?;
    let mut u = project(vel, &s);
    let n = libm::ceil(p.total_time / dt - 1e-9).max(1.0) as usize;
    let h = p.total_time / n as f64;
    for _ in 0..n {
        u = fluid_step(vel, &u, h, epsilon, p.closure)?;
    }
    Ok(u.moments.iter().map(|m| m[0]).collect())
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KineticCell {
    pub eps: f64,
    pub dt: f64,
    pub l2_error_vs_ref: f64,
    pub l2_error_vs_fluid: f64,
    pub mass_drift: f64,
    pub max_f: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KineticReport {
    pub params: KineticParams,
    pub eps_grid: Vec<f64>,
    pub dt_grid: Vec<f64>,
    /// Row-major: eps outer, dt inner.
    pub cells: Vec<KineticCell>,
    pub initial_max: f64,
    /// `max_f <= initial_max (1 + 1e-2)` in every cell.
    pub stable: bool,
    /// eps-slope of the fluid deviation at the smallest dt.
    pub eps_slope: Option<LineFit>,
    /// dt-slope of the reference error at the smallest eps.
    pub dt_slope: Option<LineFit>,
    pub max_mass_drift: f64,
}

pub fn kinetic_ap_sweep<E: CellExecutor>(
    p: &KineticParams,
    eps_grid: &[f64],
    dt_grid: &[f64],
    exec: &E,
) -> Result<KineticReport> {
    if eps_grid.len() < 4 || dt_grid.len() < 4 {
        return Err(Error::Fit("kinetic sweep needs at least 4 points per axis".into()));
    }
    if p.reference_refinement < 2 {
        return Err(Error::InvalidParameter("reference refinement must be at least 2".into()));
    }
    let vel = Velocities::new(p.velocities)?;
    let dt_min = dt_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let dt_ref = dt_min / p.reference_refinement as f64;
    let references: Vec<Result<Vec<f64>>> =
        exec.map(eps_grid.len(), |ie| run_kinetic(&vel, p, eps_grid[ie], dt_ref).map(|r| r.density));
    let references: Vec<Vec<f64>> = references.into_iter().collect::<Result<_>>()?;
    let nd = dt_grid.len();
    let dx = 1.0 / p.nx as f64;
    let cells: Vec<Result<KineticCell>> = exec.map(eps_grid.len() * nd, |k| {
        let (ie, idt) = (k / nd, k % nd);
        let (eps, dt) = (eps_grid[ie], dt_grid[idt]);
        let run = run_kinetic(&vel, p, eps, dt)?;
        let fluid = run_fluid(&vel, p, eps, dt)?;
        Ok(KineticCell {
            eps,
            dt,
            l2_error_vs_ref: l2_density(&run.density, &references[ie], dx),
            l2_error_vs_fluid: l2_density(&run.density, &fluid, dx),
            mass_drift: run.mass_drift,
            max_f: run.max_f,
        })
    });
    let cells: Vec<KineticCell> = cells.into_iter().collect::<Result<_>>()?;
    let initial_max = smooth_equilibrium(&vel, p.nx, 1.0, p.amplitude)?.max_abs();
    let argmin = |g: &[f64]| (0..g.len()).min_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap_or(0);
    let (ie0, idt0) = (argmin(eps_grid), argmin(dt_grid));
    let col: Vec<f64> = (0..eps_grid.len()).map(|ie| cells[ie * nd + idt0].l2_error_vs_fluid).collect();
    let row: Vec<f64> = (0..nd).map(|j| cells[ie0 * nd + j].l2_error_vs_ref).collect();
    Ok(KineticReport {
        params: *p,
        eps_grid: eps_grid.to_vec(),
        dt_grid: dt_grid.to_vec(),
        stable: cells.iter().all(|c| c.max_f <= initial_max * (1.0 + 1e-2)),
        max_mass_drift: cells.iter().map(|c| c.mass_drift).fold(0.0, f64::max),
        eps_slope: power_law(eps_grid, &col, 1e-14).ok(),
        dt_slope: power_law(dt_grid, &row, 1e-14).ok(),
        cells,
        initial_max,
    })
}

/// `||P(step(f)) - fluid_step(P f)||` in `L^2` for a state `f` reached after
/// one kinetic step from equilibrium data.
pub fn limit_commutation(vel: &Velocities, p: &KineticParams, epsilon: f64, dt: f64) -> Result<f64> {
    let s0 = smooth_equilibrium(vel, p.nx, epsilon, p.amplitude)?;
    let s = imex_step(vel, &s0, dt, p.relaxation)?;
    let stepped = imex_step(vel, &s, dt, p.relaxation)?.density(vel);
    let fluid = fluid_step(vel, &project(vel, &s), dt, epsilon, FluidClosure::Limit)?;
    let rho: Vec<f64> = fluid.moments.iter().map(|m| m[0]).collect();
    Ok(l2_density(&stepped, &rho, s.dx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;

    fn two() -> Velocities {
        Velocities::new(VelocitySet::TwoVelocity { drift: 0.5 }).unwrap()
    }

    fn hermite() -> Velocities {
        Velocities::new(VelocitySet::GaussHermite { points: 8 }).unwrap()
    }

    #[test]
    fn hermite_rule_moments() {
        let (v, w) = gauss_hermite(8).unwrap();
        let mom = |k: i32| v.iter().zip(&w).map(|(x, w)| w * libm::pow(*x, k as f64)).sum::<f64>();
        assert!((mom(0) - 1.0).abs() < 1e-13);
        assert!(mom(1).abs() < 1e-13 && mom(3).abs() < 1e-13);
        assert!((mom(2) - 1.0).abs() < 1e-13);
        assert!((mom(4) - 3.0).abs() < 1e-12);
        assert!((mom(6) - 15.0).abs() < 1e-11);
    }

    #[test]
    fn equilibrium_is_a_collision_fixed_point() {
        for vel in [two(), hermite()] {
            let s = smooth_equilibrium(&vel, 32, 0.1, 0.5).unwrap();
            let q = bgk_collision(&vel, &s).unwrap();
            assert!(q.iter().all(|x| x.abs() < 1e-14));
        }
    }

    #[test]
    fn collision_conserves_moments() {
        for vel in [two(), hermite()] {
            let mut s = smooth_equilibrium(&vel, 16, 0.1, 0.3).unwrap();
            for (k, x) in s.f.iter_mut().enumerate() {
                *x *= 1.0 + 0.2 * libm::sin(k as f64);
            }
            let q = bgk_collision(&vel, &s).unwrap();
            for i in 0..s.nx {
                let m = vel.moments(|j| q[j * s.nx + i]);
                for k in 0..vel.moment_count() {
                    assert!(m[k].abs() < 1e-12, "cell {i} moment {k}: {}", m[k]);
                }
            }
        }
    }

    #[test]
    fn two_velocity_relaxation_is_closed_form() {
        // f+ - f- relaxes toward a (f+ + f-) at rate 1 / eps.
        let vel = two();
        let s = KineticState { nx: 3, dx: 1.0 / 3.0, epsilon: 0.5, f: vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0] };
        let q = bgk_collision(&vel, &s).unwrap();
        assert!((q[0] - 0.5).abs() < 1e-15 && (q[3] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn negative_density_is_reported() {
        let vel = two();
        let s = KineticState { nx: 3, dx: 1.0 / 3.0, epsilon: 0.5, f: vec![1.0, -3.0, 1.0, 1.0, 1.0, 1.0] };
        assert!(matches!(bgk_collision(&vel, &s), Err(Error::NegativeDensity { cell: 1 })));
    }

    #[test]
    fn cfl_is_enforced() {
        let vel = two();
        let s = smooth_equilibrium(&vel, 100, 1.0, 0.5).unwrap();
        assert!(matches!(imex_step(&vel, &s, 0.0095, Relaxation::Implicit), Err(Error::Cfl { .. })));
    }

    #[test]
    fn uniform_equilibrium_is_fixed() {
        for vel in [two(), hermite()] {
            let s = smooth_equilibrium(&vel, 50, 1e-3, 0.0).unwrap();
            let dt = 0.5 / (50.0 * vel.max_speed());
            let next = imex_step(&vel, &s, dt, Relaxation::Implicit).unwrap();
            let dev = next.f.iter().zip(&s.f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-14);
        }
    }

    #[test]
    fn conservation_per_step() {
        let p = KineticParams { nx: 64, ..Default::default() };
        let r = run_kinetic(&two(), &p, 1e-2, 0.01).unwrap();
        assert!(r.mass_drift < 1e-13);
        let p = KineticParams { nx: 64, velocities: VelocitySet::GaussHermite { points: 8 }, ..Default::default() };
        let vel = hermite();
        let dt = 0.8 / (64.0 * vel.max_speed());
        let r = run_kinetic(&vel, &p, 1e-2, dt).unwrap();
        assert!(r.mass_drift < 1e-13 && r.momentum_drift < 1e-13, "{r:?}");
    }

    #[test]
    fn small_eps_follows_the_fluid_scheme() {
        let p = KineticParams::default();
        let vel = two();
        let dt = 0.004;
        let kin = run_kinetic(&vel, &p, 1e-8, dt).unwrap();
        let fl = run_fluid(&vel, &p, 1e-8, dt).unwrap();
        assert!(l2_density(&kin.density, &fl, 1.0 / 200.0) < 1e-3);
    }

    #[test]
    fn large_eps_matches_a_fine_reference() {
        let p = KineticParams::default();
        let vel = two();
        let coarse = run_kinetic(&vel, &p, 1.0, 0.004).unwrap();
        let half = run_kinetic(&vel, &p, 1.0, 0.002).unwrap();
        let fine = run_kinetic(&vel, &p, 1.0, 0.00004).unwrap();
        let e1 = l2_density(&coarse.density, &fine.density, 1.0 / 200.0);
        let e2 = l2_density(&half.density, &fine.density, 1.0 / 200.0);
        assert!(e1 / e2 > 1.6 && e1 / e2 < 2.5, "{e1} {e2}");
    }

    #[test]
    fn layered_relaxation_agrees_in_the_limit() {
        let p = KineticParams { relaxation: Relaxation::Layered, ..Default::default() };
        let vel = two();
        let kin = run_kinetic(&vel, &p, 1e-4, 0.004).unwrap();
        let fl = run_fluid(&vel, &p, 1e-4, 0.004).unwrap();
        assert!(l2_density(&kin.density, &fl, 1.0 / 200.0) < 1e-3);
    }

    #[test]
    fn viscous_solver_is_exact_on_a_mode() {
        let n = 16;
        let rhs: Vec<f64> = (0..n).map(|i| libm::cos(2.0 * core::f64::consts::PI * i as f64 / n as f64)).collect();
        let r = 0.7;
        let x = periodic_tridiagonal(-r, 1.0 + 2.0 * r, -r, &rhs).unwrap();
        let lam = 1.0 + 2.0 * r * (1.0 - libm::cos(2.0 * core::f64::consts::PI / n as f64));
        for i in 0..n {
            assert!((x[i] - rhs[i] / lam).abs() < 1e-14);
        }
    }

    #[test]
    fn commutation_defect_is_first_order_in_eps() {
        let p = KineticParams::default();
        let vel = two();
        let a = limit_commutation(&vel, &p, 1e-5, 0.004).unwrap();
        let b = limit_commutation(&vel, &p, 1e-6, 0.004).unwrap();
        assert!((a / b - 10.0).abs() < 1.0, "{a} {b}");
    }

    #[test]
    fn sweep_shape_and_stability() {
        let p = KineticParams { nx: 50, total_time: 0.05, ..Default::default() };
        let r = kinetic_ap_sweep(&p, &[1.0, 1e-2, 1e-4, 1e-8], &[0.016, 0.008, 0.004, 0.002], &Sequential).unwrap();
        assert_eq!(r.cells.len(), 16);
        assert!(r.stable);
        assert!(r.max_mass_drift < 1e-12);
    }
}
