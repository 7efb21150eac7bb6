// Copyright 2026 The aplab Authors
// SPDX-License-Identifier: Apache-2.0

//! Dispatch from a validated config to the numerics. Each runner returns
//! JSON results, plot-ready tables and threshold checks; nothing is written
//! here.

use aplab_core::cavity::{
    build_cavity, cavity_ap_sweep, cavity_damping, cavity_spectrum, purcell_check, steady_state_endpoint, CavityModel,
    CavitySpectrum,
};
use aplab_core::elimination::{dynamics_error, effective_generator, exact_schur_complement, StiffGenerator};
use aplab_core::exec::CellExecutor;
use aplab_core::fit::{power_law, LineFit};
use aplab_core::kinetic::kinetic_ap_sweep;
use aplab_core::linalg::{induced_trace_norm, Superoperator};
use aplab_core::lindblad::{ops, LindbladGenerator};
use aplab_core::metrics::{diamond_norm_with, stability_check_with, DiamondMethod, DiamondOptions};
use aplab_core::protocol::{
    ap_verify, bound_step_count, certificate_from, commutator_diamond, duhamel_oracle, evolve, interaction_term,
    resource_model_with, steps_to_tolerance, CostConstants, ProtocolConfig, ResourceInputs, SweepOptions, SweepReport,
};
use aplab_core::spectral::{analyze, decay_rate_fit_from};
use aplab_core::{kron, rng, ComplexMatrix};
use serde_json::{json, Value};

use crate::config::*;
use crate::error::LabResult;
use crate::output::{num, Check, Table};

/// Floor below which fitted errors count as rounding noise.
const FIT_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub results: Value,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

pub fn run_experiment<E: CellExecutor>(cfg: &ExperimentConfig, exec: &E) -> LabResult<Outcome> {
    cfg.validate()?;
    let seed = cfg.seed;
    match &cfg.experiment {
        Experiment::Spectrum(s) => spectrum(s, seed),
        Experiment::Eliminate(s) => eliminate(s, seed, exec),
        Experiment::Diamond(s) => diamond(s, seed, exec),
        Experiment::Simulate(s) => simulate(s, seed, exec),
        Experiment::Sweep(s) => sweep(s, seed, exec),
        Experiment::Cavity(s) => cavity(s, seed, exec),
        Experiment::Kinetic(s) => kinetic(s, exec),
        Experiment::Resources(s) => resources(s),
    }
}

pub fn build_stiff(m: &StiffModel, seed: u64) -> LabResult<StiffGenerator> {
    Ok(match *m {
        StiffModel::Cavity { omega_q, g, kappa, n_max } => build_cavity(&CavityModel::new(omega_q, g, kappa, n_max))?,
        StiffModel::Random { d_fast, d_slow, jumps, fast_scale, slow_scale, epsilon, stream } => {
            let mut r = rng::stream(seed, 1000 + stream);
            let local = rng::lindbladian(&mut r, d_fast, jumps, fast_scale);
            let slow = rng::lindbladian(&mut r, d_fast * d_slow, jumps, slow_scale);
            let rho = analyze(&local)?.steady_state;
            StiffGenerator::new(local.tensor_right(d_slow), slow, epsilon)?.with_split(d_fast, d_slow, rho)?
        }
        StiffModel::Commuting { epsilon } => {
            let id = ComplexMatrix::identity(2);
            let fast = LindbladGenerator::new(ComplexMatrix::zeros(2, 2), vec![ops::sigma_minus()])?.tensor_right(2);
            let slow = LindbladGenerator::new(
                kron(&id, &ops::pauli_x()).scale_re(0.7),
                vec![kron(&id, &ops::pauli_z()).scale_re(0.3)],
            )?;
            StiffGenerator::new(fast, slow, epsilon)?.with_split(2, 2, ops::unit(2, 0, 0))?
        }
    })
}

pub fn build_fast(m: &FastModel, seed: u64) -> LabResult<LindbladGenerator> {
    Ok(match *m {
        FastModel::CavityDamping { kappa, n_max, .. } => {
            cavity_damping(&CavityModel::new(1.0, 1.0, kappa, n_max))?.tensor_right(2)
        }
        FastModel::Depolarizing { d, rate } => {
            let s = (rate / d as f64).sqrt();
            let jumps = (0..d * d).map(|k| ops::unit(d, k / d, k % d).scale_re(s)).collect();
            LindbladGenerator::new(ComplexMatrix::zeros(d, d), jumps)?
        }
        FastModel::Random { d, jumps, scale, stream } => {
            rng::lindbladian(&mut rng::stream(seed, 2000 + stream), d, jumps, scale)
        }
    })
}

fn label(m: &FastModel) -> String {
    match *m {
        FastModel::CavityDamping { n_max, .. } => format!("cavity-damping-n{n_max}"),
        FastModel::Depolarizing { d, .. } => format!("depolarizing-d{d}"),
        FastModel::Random { d, stream, .. } => format!("random-d{d}-s{stream}"),
    }
}

fn slope(fit: &Option<LineFit>) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.slope)
}

fn fit_json(fit: &Option<LineFit>) -> Value {
    match fit {
        Some(f) => json!({ "slope": f.slope, "intercept": f.intercept, "r_squared": f.r_squared, "points": f.points }),
        None => Value::Null,
    }
}

fn scaled_dts(grid: &[f64], scale: DtScale, sg: &StiffGenerator) -> Vec<f64> {
    match scale {
        DtScale::Absolute => grid.to_vec(),
        DtScale::SlowNorm => {
            let n = sg.slow_norm();
            grid.iter().map(|dt| dt / n).collect()
        }
    }
}

fn cavity_spectrum_checks(s: &CavitySpectrum, checks: &mut Vec<Check>) {
    checks.push(Check::at_most("cavity-gap-equals-kappa", s.gap_relative_error, 1e-10));
    checks.push(Check::flag("cavity-kernel-dim-4", s.kernel_dim == 4));
    checks.push(Check::at_most("cavity-projection", s.projection_error, 1e-10));
}

fn cavity_spectrum_json(s: &CavitySpectrum) -> Value {
    json!({
        "gap": s.gap,
        "kappa": s.kappa,
        "gap_relative_error": s.gap_relative_error,
        "kernel_dim": s.kernel_dim,
        "projection_error": s.projection_error,
        "ladder_error": s.ladder_error,
    })
}

fn eigen_table(name: &str, s: &CavitySpectrum) -> Table {
    let mut t = Table::new(name, &["index", "re", "im"]);
    for (k, l) in s.eigenvalues.iter().enumerate() {
        t.push(vec![k.to_string(), num(l.re), num(l.im)]);
    }
    t
}

fn spectrum(s: &SpectrumSpec, seed: u64) -> LabResult<Outcome> {
    let mut summary =
        Table::new("spectrum", &["model", "dim", "gap", "kernel_dim", "fitted_rate", "relative_error", "used"]);
    let mut decay = Table::new("decay", &["model", "t", "distance"]);
    let mut checks = Vec::new();
    let mut models = Vec::new();
    for m in &s.models {
        let name = label(m);
        let g = build_fast(m, seed)?;
        let sd = analyze(&g)?;
        let fit = decay_rate_fit_from(&sd, s.norm)?;
        let rel = (fit.rate - fit.gap).abs() / fit.gap;
        summary.push(vec![
            name.clone(),
            g.dim().to_string(),
            num(fit.gap),
            sd.kernel_dim.to_string(),
            num(fit.rate),
            num(rel),
            fit.used.to_string(),
        ]);
        for &(t, v) in &fit.samples {
            decay.push(vec![name.clone(), num(t), num(v)]);
        }
        checks.push(Check::at_most(&format!("decay-rate-{name}"), rel, 0.05));
        let mut entry = json!({
            "model": name,
            "gap": fit.gap,
            "kernel_dim": sd.kernel_dim,
            "primitive": sd.primitive,
            "fitted_rate": fit.rate,
            "prefactor": fit.prefactor,
            "relative_error": rel,
        });
        if let FastModel::CavityDamping { kappa, n_max, samples } = *m {
            let cs = cavity_spectrum(&CavityModel::new(1.0, 1.0, kappa, n_max), samples, seed)?;
            cavity_spectrum_checks(&cs, &mut checks);
            entry["cavity"] = cavity_spectrum_json(&cs);
        }
        models.push(entry);
    }
    Ok(Outcome { results: json!({ "models": models }), tables: vec![summary, decay], checks })
}

fn eliminate<E: CellExecutor>(s: &EliminateSpec, seed: u64, exec: &E) -> LabResult<Outcome> {
    let base = build_stiff(&s.model, seed)?;
    let rows = exec.map(s.eps_grid.len(), |i| -> LabResult<(f64, f64, bool, f64)> {
        let sg = base.with_epsilon(s.eps_grid[i])?;
        let eff = effective_generator(&sg)?;
        let schur = exact_schur_complement(&sg)?;
        let schur_err = induced_trace_norm(&schur.sub(&eff.superoperator)).value;
        let dyn_err = dynamics_error(&sg, &eff, s.time)?;
        Ok((schur_err, dyn_err, eff.cptp_verdict.cptp, eff.cptp_verdict.cp_violation))
    });
    let rows: Vec<_> = rows.into_iter().collect::<LabResult<_>>()?;
    let mut t = Table::new("elimination", &["eps", "schur_error", "dynamics_error", "cptp", "cp_violation"]);
    for (eps, r) in s.eps_grid.iter().zip(&rows) {
        t.push(vec![num(*eps), num(r.0), num(r.1), r.2.to_string(), num(r.3)]);
    }
    let schur: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let dynamics: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let schur_fit = power_law(&s.eps_grid, &schur, FIT_FLOOR).ok();
    let dyn_fit = power_law(&s.eps_grid, &dynamics, FIT_FLOOR).ok();
    let centering = effective_generator(&base)?.centering;
    let checks = vec![
        Check::within("schur-vs-effective-eps-slope", slope(&schur_fit), 2.0, 0.2),
        Check::within("dynamics-eps-slope", slope(&dyn_fit), 1.0, 0.15),
    ];
    let results = json!({
        "dim": base.dim(),
        "time": s.time,
        "schur_fit": fit_json(&schur_fit),
        "dynamics_fit": fit_json(&dyn_fit),
        "centering_residual": centering.residual,
        "centering_satisfied": centering.satisfied,
    });
    Ok(Outcome { results, tables: vec![t], checks })
}

fn diamond<E: CellExecutor>(s: &DiamondSpec, seed: u64, exec: &E) -> LabResult<Outcome> {
    let opts = |k: u64| DiamondOptions {
        random_starts: s.random_starts,
        seed: seed.wrapping_mul(0x9e37_79b9).wrapping_add(k),
        ..DiamondOptions::default()
    };
    let dim = |k: usize| s.dims[k % s.dims.len()];
    let channels = exec.map(s.channels, |k| {
        let mut r = rng::stream(seed, 3000 + k as u64);
        let ch = rng::channel(&mut r, dim(k), s.kraus_rank);
        diamond_norm_with(&ch, &opts(k as u64))
    });
    let channels: Vec<_> = channels.into_iter().collect::<Result<_, _>>()?;
    let mut ct = Table::new(
        "channels",
        &["index", "dim", "value", "lower_bound", "upper_bound", "duality_gap", "converged", "iterations"],
    );
    let mut worst_unit: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut converged = 0usize;
    for (k, r) in channels.iter().enumerate() {
        let ok = r.method == DiamondMethod::SdpConverged;
        ct.push(vec![
            k.to_string(),
            dim(k).to_string(),
            num(r.value),
            num(r.lower_bound),
            num(r.upper_bound),
            num(r.duality_gap),
            ok.to_string(),
            r.iterations.to_string(),
        ]);
        worst_unit = worst_unit.max((r.value - 1.0).abs());
        if ok {
            converged += 1;
            worst_gap = worst_gap.max(r.duality_gap);
        }
    }

    // Differences of channels: Hermiticity-preserving, not CP.
    let pairs = exec.map(s.pairs, |k| -> LabResult<[f64; 5]> {
        let d = dim(k);
        let mut r = rng::stream(seed, 4000 + k as u64);
        let mut diff = || {
            let a = rng::channel(&mut r, d, s.kraus_rank);
            let b = rng::channel(&mut r, d, s.kraus_rank);
            a.sub(&b)
        };
        let (a, b) = (diff(), diff());
        let o = opts(100 + k as u64);
        let n = |m: &Superoperator| diamond_norm_with(m, &o).map(|r| r.value);
        let (na, nb) = (n(&a)?, n(&b)?);
        let nab = n(&a.compose(&b))?;
        let nsum = n(&a.add(&b))?;
        let stab = stability_check_with(&a, s.ancilla, &o)?;
        Ok([na, nb, nab, nsum, stab.difference])
    });
    let pairs: Vec<_> = pairs.into_iter().collect::<LabResult<_>>()?;
    let mut pt = Table::new(
        "pairs",
        &[
            "index",
            "dim",
            "norm_a",
            "norm_b",
            "norm_composed",
            "norm_sum",
            "submult_slack",
            "triangle_slack",
            "stability_difference",
        ],
    );
    let (mut sub_worst, mut tri_worst, mut stab_worst) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64);
    for (k, p) in pairs.iter().enumerate() {
        let sub = p[2] - p[0] * p[1];
        let tri = p[3] - p[0] - p[1];
        sub_worst = sub_worst.max(sub);
        tri_worst = tri_worst.max(tri);
        stab_worst = stab_worst.max(p[4]);
        pt.push(vec![
            k.to_string(),
            dim(k).to_string(),
            num(p[0]),
            num(p[1]),
            num(p[2]),
            num(p[3]),
            num(sub),
            num(tri),
            num(p[4]),
        ]);
    }

    let p = s.phase_flip;
    let z = ops::pauli_z();
    let flip = Superoperator::from_map(2, |x| &x.scale_re(1.0 - p) + &(&(&z * x) * &z).scale_re(p));
    let pf = diamond_norm_with(&flip.sub(&Superoperator::identity(2)), &opts(999))?;
    let checks = vec![
        Check::at_most("cptp-diamond-is-one", worst_unit, 1e-6),
        Check::at_most("stability-ancilla", stab_worst, 1e-5),
        Check::at_most("submultiplicativity-slack", sub_worst, 1e-8),
        Check::at_most("triangle-slack", tri_worst, 1e-8),
        Check::at_most("duality-gap-converged", worst_gap, 1e-6),
        Check::at_most("phase-flip-vs-closed-form", (pf.value - 2.0 * p).abs(), 1e-4),
    ];
    let results = json!({
        "channels": s.channels,
        "converged": converged,
        "worst_unit_deviation": worst_unit,
        "worst_duality_gap": worst_gap,
        "worst_submultiplicativity_slack": sub_worst,
        "worst_triangle_slack": tri_worst,
        "worst_stability_difference": stab_worst,
        "phase_flip": { "p": p, "distance": pf.value, "closed_form": 2.0 * p, "duality_gap": pf.duality_gap },
    });
    Ok(Outcome { results, tables: vec![ct, pt], checks })
}

fn simulate<E: CellExecutor>(s: &SimulateSpec, seed: u64, exec: &E) -> LabResult<Outcome> {
    let sg = build_stiff(&s.model, seed)?;
    let mut results = json!({ "dim": sg.dim(), "epsilon": sg.epsilon });
    let mut tables = Vec::new();
    let mut checks = Vec::new();

    if let Some(p) = &s.protocol {
        results["evolution"] = evolution(&sg, p)?;
    }

    if let Some(st) = &s.stiffness {
        let comm = commutator_diamond(&sg)?;
        let rows = exec.map(st.eps_grid.len(), |i| {
            let e = sg.with_epsilon(st.eps_grid[i])?;
            steps_to_tolerance(&e, st.total_time, st.delta, st.order, st.norm, st.max_steps)
        });
        let rows: Vec<_> = rows.into_iter().collect::<Result<_, _>>()?;
        let mut t = Table::new("stiffness", &["eps", "steps", "error", "bound_steps"]);
        let mut bounds = Vec::new();
        for r in &rows {
            let b = bound_step_count(comm, r.epsilon, st.total_time, st.delta);
            bounds.push(b);
            t.push(vec![num(r.epsilon), r.steps.to_string(), num(r.error), num(b)]);
        }
        let steps: Vec<f64> = rows.iter().map(|r| r.steps as f64).collect();
        let fit = power_law(&st.eps_grid, &steps, 0.0).ok();
        let bound_fit = power_law(&st.eps_grid, &bounds, 0.0).ok();
        checks.push(Check::within("trotter-steps-eps-slope", slope(&fit), -1.0, 0.15));
        results["stiffness"] = json!({
            "commutator_diamond": comm,
            "steps_fit": fit_json(&fit),
            "bound_fit": fit_json(&bound_fit),
        });
        tables.push(t);
    }

    if let Some(c) = &s.certificate {
        let mut models = vec![("model".to_string(), sg.clone())];
        for (k, m) in c.extra_models.iter().enumerate() {
            models.push((format!("extra-{k}"), build_stiff(m, seed)?));
        }
        if c.commuting_control {
            models.push(("commuting".into(), build_stiff(&StiffModel::Commuting { epsilon: sg.epsilon }, seed)?));
        }
        let mut t = Table::new("certificate", &["model", "eps", "dt", "dt_norm", "bound", "measured", "ratio"]);
        let mut per_model = Vec::new();
        for (name, m) in &models {
            let comm = commutator_diamond(m)?;
            let norm1 = m.full_superoperator().matrix().norm_one();
            let certs = exec.map(c.dt_norm.len(), |i| certificate_from(m, c.dt_norm[i] / norm1, comm));
            let certs: Vec<_> = certs.into_iter().collect::<Result<_, _>>()?;
            let mut worst_ratio: f64 = 0.0;
            let mut worst_measured: f64 = 0.0;
            for cert in &certs {
                t.push(vec![
                    name.clone(),
                    num(cert.epsilon),
                    num(cert.dt),
                    num(cert.dt_norm),
                    num(cert.bound),
                    num(cert.measured),
                    num(cert.ratio),
                ]);
                if cert.dt_norm <= 0.1 + 1e-12 {
                    worst_ratio = worst_ratio.max(cert.ratio);
                }
                worst_measured = worst_measured.max(cert.measured);
            }
            if name == "commuting" {
                checks.push(Check::at_most("commuting-parts-error", worst_measured, 1e-12));
            } else {
                checks.push(Check::at_most(&format!("certificate-ratio-{name}"), worst_ratio, 1.2));
            }
            per_model.push(json!({
                "model": name,
                "dim": m.dim(),
                "commutator_diamond": comm,
                "worst_ratio": worst_ratio,
                "worst_measured": worst_measured,
            }));
        }
        results["certificate"] = json!(per_model);
        tables.push(t);
    }

    if let Some(d) = &s.duhamel {
        let oracle = duhamel_oracle(&sg, d.time, d.terms)?;
        let exact = sg.full_superoperator().exp(d.time)?;
        let diff = oracle.value.sub(&exact);
        let entry = diff.matrix().max_abs();
        let induced = induced_trace_norm(&diff).value;
        let terms = exec.map(d.eps_grid.len(), |i| interaction_term(&sg.with_epsilon(d.eps_grid[i])?, d.time));
        let terms: Vec<f64> = terms.into_iter().collect::<Result<_, _>>()?;
        let mut t = Table::new("duhamel", &["eps", "interaction_term"]);
        for (e, v) in d.eps_grid.iter().zip(&terms) {
            t.push(vec![num(*e), num(*v)]);
        }
        let fit = power_law(&d.eps_grid, &terms, FIT_FLOOR).ok();
        checks.push(Check::at_most("duhamel-reproduces-exponential", induced.max(entry), 1e-8));
        checks.push(Check::within("interaction-eps-slope", slope(&fit), 1.0, 0.15));
        results["duhamel"] = json!({
            "time": d.time,
            "terms": d.terms,
            "max_entry_error": entry,
            "induced_error": induced,
            "quadrature_error_estimate": oracle.error_estimate,
            "evaluations": oracle.evaluations,
            "interaction_fit": fit_json(&fit),
        });
        tables.push(t);
    }
    Ok(Outcome { results, tables, checks })
}

fn evolution(sg: &StiffGenerator, p: &ProtocolConfig) -> LabResult<Value> {
    let ev = evolve(sg, p)?;
    let exact = sg.full_superoperator().exp(p.total_time)?;
    let eff = effective_generator(sg)?;
    Ok(json!({
        "mode": p.mode,
        "steps": ev.steps,
        "dt_effective": ev.dt_effective,
        "cptp": ev.cptp,
        "min_choi_eigenvalue": ev.min_choi_eigenvalue,
        "trace_defect": ev.trace_defect,
        "error_vs_exact": induced_trace_norm(&ev.channel.sub(&exact)).value,
        "error_vs_effective": induced_trace_norm(&ev.channel.sub(&eff.propagator(p.total_time)?)).value,
    }))
}

fn sweep_table(r: &SweepReport) -> Table {
    let mut t = Table::new(
        "sweep",
        &[
            "eps",
            "dt",
            "norm",
            "consistency_err",
            "asymptotic_err",
            "slow_err",
            "fast_err",
            "interaction_err",
            "diagram_distance",
            "in_eps_fit",
            "in_dt_fit",
        ],
    );
    for c in &r.cells {
        let e = &c.errors;
        t.push(vec![
            num(c.eps),
            num(c.dt),
            c.norm.name().to_string(),
            num(e.consistency_err),
            num(e.asymptotic_err),
            num(e.slow_err),
            num(e.fast_err),
            num(e.interaction_err),
            num(c.diagram_distance),
            c.in_eps_fit.to_string(),
            c.in_dt_fit.to_string(),
        ]);
    }
    t
}

fn sweep_fits_json(r: &SweepReport) -> Value {
    let f = &r.fits;
    json!({
        "mode": r.mode,
        "norm": r.norm,
        "p": f.p,
        "p_by_eps": f.p_by_eps,
        "q": f.q,
        "eps_slope": fit_json(&f.eps_slope),
        "dt_slope": fit_json(&f.dt_slope),
        "c1_by_eps": f.c1_by_eps,
        "diagram_max": f.diagram_max,
        "diagram_monotone": f.diagram_monotone,
        "triangle_holds": f.triangle_holds,
        "spot_checks": r.spot_checks.iter().map(|s| json!({
            "eps": s.eps, "dt": s.dt, "induced": s.induced, "diamond": s.diamond, "ratio": s.ratio,
        })).collect::<Vec<_>>(),
    })
}

fn spot_checks(r: &SweepReport, want: usize, checks: &mut Vec<Check>) {
    let worst = r
        .spot_checks
        .iter()
        .map(|s| s.ratio)
        .fold(1.0, |a: f64, b| if (b - 1.0).abs() > (a - 1.0).abs() { b } else { a });
    checks.push(Check::range("diamond-over-induced", worst, 0.5, 2.0));
    checks.push(Check::flag("diamond-spot-count", r.spot_checks.len() >= want.min(r.cells.len())));
}

fn sweep<E: CellExecutor>(s: &SweepSpec, seed: u64, exec: &E) -> LabResult<Outcome> {
    let sg = build_stiff(&s.model, seed)?;
    let dts = scaled_dts(&s.dt_grid, s.dt_scale, &sg);
    let opts = SweepOptions { diamond_spots: s.diamond_spots, ..SweepOptions::default() };
    let report = ap_verify(&sg, &s.protocol, &s.eps_grid, &dts, s.norm, &opts, exec)?;
    let mut checks = vec![Check::flag("triangle-inequality", report.fits.triangle_holds)];
    spot_checks(&report, s.diamond_spots, &mut checks);
    let results = json!({ "dim": sg.dim(), "slow_norm": sg.slow_norm(), "fits": sweep_fits_json(&report) });
    Ok(Outcome { results, tables: vec![sweep_table(&report)], checks })
}

fn cavity<E: CellExecutor>(s: &CavitySpec, seed: u64, exec: &E) -> LabResult<Outcome> {
    let m = &s.model;
    let mut results = json!({ "model": m, "epsilon": m.epsilon(), "purcell_rate": m.purcell_rate() });
    let mut tables = Vec::new();
    let mut checks = Vec::new();
    if s.spectrum_samples > 0 {
        let cs = cavity_spectrum(m, s.spectrum_samples, seed)?;
        cavity_spectrum_checks(&cs, &mut checks);
        results["spectrum"] = cavity_spectrum_json(&cs);
        tables.push(eigen_table("spectrum", &cs));
    }
    if s.purcell {
        let p = purcell_check(m)?;
        checks.push(Check::at_most("purcell-max-entry-error", p.max_entry_error, 1e-8));
        checks.push(Check::at_most("purcell-cutoff-sensitivity", p.cutoff_sensitivity, 1e-10));
        results["purcell"] = json!({
            "gamma_expected": p.gamma_expected,
            "gamma_measured": p.gamma_measured,
            "max_entry_error": p.max_entry_error,
            "cutoff_sensitivity": p.cutoff_sensitivity,
            "first_order_coupling": p.first_order_coupling,
        });
        let mut t = Table::new("purcell", &["row", "col", "reduced_re", "reduced_im", "target_re", "target_im"]);
        let (a, b) = (p.reduced.matrix(), p.target.matrix());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                t.push(vec![
                    i.to_string(),
                    j.to_string(),
                    num(a[(i, j)].re),
                    num(a[(i, j)].im),
                    num(b[(i, j)].re),
                    num(b[(i, j)].im),
                ]);
            }
        }
        tables.push(t);
    }
    if s.steady_state {
        let r = steady_state_endpoint(m)?;
        results["steady_state"] = json!({ "time": r.time, "distance": r.distance, "unique": r.unique });
    }
    if let Some(w) = &s.sweep {
        let sg = build_cavity(m)?;
        let dts = scaled_dts(&w.dt_grid, w.dt_scale, &sg);
        let mut inputs = ResourceInputs::new(w.c, w.delta, w.total_time);
        inputs.constants = CostConstants::default();
        let opts = SweepOptions { diamond_spots: w.diamond_spots, ..SweepOptions::default() };
        let out = cavity_ap_sweep(m, &dts, &w.eps_grid, &inputs, &opts, exec)?;
        let r = &out.report;
        checks.push(Check::within("asymptotic-eps-slope", slope(&r.fits.eps_slope), 1.0, 0.15));
        checks.push(Check::within("asymptotic-dt-slope", slope(&r.fits.dt_slope), 2.0, 0.2));
        spot_checks(r, w.diamond_spots, &mut checks);
        results["sweep"] = json!({
            "slow_norm": sg.slow_norm(),
            "dt_grid": dts,
            "fits": sweep_fits_json(r),
            "two_term_bound": out.bound.as_ref().map(|b| json!({
                "c_eps_dt": b.c_eps_dt, "c_dt2": b.c_dt2, "max_relative_residual": b.max_relative_residual,
            })),
        });
        tables.push(sweep_table(r));
        let mut t = Table::new(
            "resources",
            &["eps", "kappa", "d_fast", "d_slow", "g_std", "g_ap_analog", "g_ap_elim", "savings_ratio"],
        );
        for (eps, e) in w.eps_grid.iter().zip(&out.resources) {
            t.push(vec![
                num(*eps),
                num(e.kappa),
                e.d_fast.to_string(),
                e.d_slow.to_string(),
                num(e.g_std),
                num(e.g_ap_analog),
                num(e.g_ap_elim),
                num(e.savings_ratio),
            ]);
        }
        tables.push(t);
    }
    Ok(Outcome { results, tables, checks })
}

fn kinetic<E: CellExecutor>(s: &KineticSpec, exec: &E) -> LabResult<Outcome> {
    let r = kinetic_ap_sweep(&s.params, &s.eps_grid, &s.dt_grid, exec)?;
    let mut t = Table::new("kinetic", &["eps", "dt", "l2_error_vs_ref", "l2_error_vs_fluid", "mass_drift", "max_f"]);
    for c in &r.cells {
        t.push(vec![
            num(c.eps),
            num(c.dt),
            num(c.l2_error_vs_ref),
            num(c.l2_error_vs_fluid),
            num(c.mass_drift),
            num(c.max_f),
        ]);
    }
    let checks = vec![
        Check::flag("eps-uniform-stability", r.stable),
        Check::within("fluid-deviation-eps-slope", slope(&r.eps_slope), 1.0, 0.2),
        Check::at_most("mass-drift-per-step", r.max_mass_drift, 1e-12),
    ];
    let results = json!({
        "params": r.params,
        "initial_max": r.initial_max,
        "stable": r.stable,
        "eps_fit": fit_json(&r.eps_slope),
        "dt_fit": fit_json(&r.dt_slope),
        "max_mass_drift": r.max_mass_drift,
        "note": "discrete L2 norm in x, smooth initial data",
    });
    Ok(Outcome { results, tables: vec![t], checks })
}

/// Relative error allowed in the exact savings identity: a few roundings.
pub const RATIO_ROUNDING: f64 = 8.0 * f64::EPSILON;

fn resources(s: &ResourcesSpec) -> LabResult<Outcome> {
    let k = s.constants.unwrap_or_default();
    let mut t = Table::new(
        "resources",
        &[
            "kappa",
            "d_fast",
            "d_slow",
            "c",
            "g_std",
            "g_ap_digital",
            "g_ap_analog",
            "g_ap_elim",
            "t_precomp",
            "savings_ratio",
            "expected_ratio",
        ],
    );
    let mut worst: f64 = 0.0;
    for &kappa in &s.kappas {
        for &d in &s.d_fast {
            for &c in &s.cs {
                let inputs = ResourceInputs {
                    c,
                    delta: s.delta,
                    poly_exponent: s.poly_exponent,
                    total_time: s.total_time,
                    tau_n: Some(s.tau_n),
                    kappa: Some(kappa),
                    constants: k,
                };
                let e = resource_model_with(d, s.d_slow, kappa, s.tau_n, &inputs)?;
                let expected = k.c_std / k.c_analog * kappa * (d as f64).powf(c);
                worst = worst.max((e.savings_ratio - expected).abs() / expected);
                t.push(vec![
                    num(kappa),
                    d.to_string(),
                    s.d_slow.to_string(),
                    num(c),
                    num(e.g_std),
                    num(e.g_ap_digital),
                    num(e.g_ap_analog),
                    num(e.g_ap_elim),
                    num(e.t_precomp),
                    num(e.savings_ratio),
                    num(expected),
                ]);
            }
        }
    }
    let checks = vec![Check::at_most("savings-ratio-identity", worst, RATIO_ROUNDING)];
    let results = json!({ "rows": t.rows.len(), "worst_relative_error": worst, "constants": k });
    Ok(Outcome { results, tables: vec![t], checks })
}
