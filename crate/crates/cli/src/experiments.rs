use rayon::prelude::*;
use serde::Serialize;

use betaplane::ekman::LayerNorms;
use betaplane::interior::{assemble_stationary, SizeNorms, StationarySolution};
use betaplane::model::{
    nondimensionalize, validate_coriolis, validate_windstress, Field, Parameters, ValidationReport,
};
use betaplane::poincare::{
    damping_weight, escape_diagnostics, integrate_ray, regime, EscapeRecord, RayState, Regime,
};
use betaplane::residual::{
    delta_report, divergence_check, residual_report, scaling_study, DivergenceCheck, ResidualReport,
};
use betaplane::rossby::{Region, SpectralState};
use betaplane::thermocline::{check_gradient_bound, convergence_study};

use crate::config::{
    RaysConfig, ResidualStudyConfig, RossbyConfig, RunConfig, ScalesConfig, StationaryConfig,
    ThermoclineConfig,
};
use crate::error::CliError;
use crate::output::OutputDir;

pub fn run(config: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    match config {
        RunConfig::Stationary(c) => stationary(c, out),
        RunConfig::ResidualStudy(c) => residual_study(c, out),
        RunConfig::Rossby(c) => rossby(c, out),
        RunConfig::PoincareRays(c) => rays(c, out),
        RunConfig::Thermocline(c) => thermocline(c, out),
        RunConfig::Scales(c) => scales(c, out),
    }
}

/// Checks every precondition of the experiment without running it.
pub fn validate(config: &RunConfig) -> Result<Vec<ValidationReport>, CliError> {
    let mut reports = Vec::new();
    match config {
        RunConfig::Stationary(c) => {
            let params = stationary_parameters(c)?;
            reports
                .push(validate_coriolis(&c.coriolis, &c.grid, &c.options.coriolis).into_result()?);
            reports.push(validate_windstress(&c.stress, &c.grid, &c.options.stress).into_result()?);
            reports.push(
                delta_report(
                    params.epsilon,
                    params.nu_h,
                    params.delta,
                    c.options.delta_margin,
                )
                .into_result()?,
            );
            if c.layer_gradients {
                build_stationary(c)?.layer().require_gradient_regularity()?;
            }
        }
        RunConfig::ResidualStudy(c) => {
            let t = &c.template;
            reports
                .push(validate_coriolis(&t.coriolis, &t.grid, &t.options.coriolis).into_result()?);
            reports.push(validate_windstress(&t.stress, &t.grid, &t.options.stress).into_result()?);
            for &eps in &c.epsilons {
                let report =
                    delta_report(eps, t.nu_h.at(eps), t.delta.at(eps), t.options.delta_margin);
                reports.push(report.into_result()?);
            }
        }
        RunConfig::Rossby(c) => {
            c.params.validate()?;
            check_times(&c.times)?;
        }
        RunConfig::PoincareRays(c) => {
            initial_states(c)?;
            if let Some(d) = c.damping {
                regime(d.nu_h, d.epsilon, d.margin)?;
            }
        }
        RunConfig::Thermocline(c) => {
            let s = &c.setup;
            s.validate()?;
            reports
                .push(validate_coriolis(&s.coriolis, &s.grid, &s.assembly.coriolis).into_result()?);
            reports
                .push(validate_windstress(&s.stress, &s.grid, &s.assembly.stress).into_result()?);
            let flow = betaplane::interior::InteriorFlow::new(
                &s.stress,
                betaplane::model::TruncatedCoriolis::exact(s.coriolis.clone()),
            )?;
            check_gradient_bound(&flow, &s.grid, s.lambda_heat)?;
        }
        RunConfig::Scales(c) => {
            nondimensionalize(&c.scales)?;
        }
    }
    Ok(reports)
}

fn stationary_parameters(c: &StationaryConfig) -> Result<Parameters, CliError> {
    let p = c.parameters;
    Ok(Parameters::distinguished(
        p.epsilon, p.nu_h, p.delta, p.alpha,
    )?)
}

fn build_stationary(c: &StationaryConfig) -> Result<StationarySolution, CliError> {
    let params = stationary_parameters(c)?;
    Ok(assemble_stationary(
        &params,
        &c.coriolis,
        &c.stress,
        &c.grid,
        &c.options,
    )?)
}

#[derive(Serialize)]
struct StationaryReport {
    parameters: Parameters,
    residual: ResidualReport,
    sizes: SizeNorms,
    layer: LayerNorms,
    /// `[∂_z u_h(0), u₃(0), u₃(1), ∂_z u_h(1) − σ/ε²]`, relative.
    boundary_defects: [f64; 4],
    divergence: Option<DivergenceCheck>,
}

fn stationary(c: &StationaryConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let sol = build_stationary(c)?;
    let layer = sol.layer().layer_norms(&c.grid, c.layer_gradients)?;
    let divergence = c
        .divergence
        .map(|d| divergence_check(&sol, d.base_step, d.halvings))
        .transpose()?;
    let report = StationaryReport {
        parameters: *sol.params(),
        residual: residual_report(&sol)?,
        sizes: sol.size_norms()?,
        layer,
        boundary_defects: sol.boundary_defects()?,
        divergence,
    };
    out.json("report.json", "stationary_report", &report)?;
    let terms: Vec<[f64; 1]> = report.residual.terms.iter().map(|t| [t.value]).collect();
    let names: Vec<&str> = report.residual.terms.iter().map(|t| t.name).collect();
    out.csv(
        "residual_terms.csv",
        &names,
        [terms.iter().map(|t| t[0]).collect::<Vec<_>>()],
    )?;
    if c.write_fields {
        let field = sol.sample()?;
        out.csv(
            "velocity.csv",
            &["x", "y", "z", "u1", "u2", "u3"],
            volume_rows(&field),
        )?;
    }
    Ok(())
}

fn volume_rows(field: &Field) -> Vec<Vec<f64>> {
    let g = *field.grid();
    let mut rows = Vec::with_capacity(g.nx() * g.ny() * field.levels());
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            for k in 0..field.levels() {
                let mut row = vec![g.x(i), g.y(j), g.z(k)];
                row.extend((0..field.components()).map(|c| field.get(c, i, j, k)));
                rows.push(row);
            }
        }
    }
    rows
}

fn horizontal_rows(field: &Field) -> Vec<Vec<f64>> {
    let g = *field.grid();
    let mut rows = Vec::with_capacity(g.nx() * g.ny());
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            let mut row = vec![g.x(i), g.y(j)];
            row.extend((0..field.components()).map(|c| field.get(c, i, j, 0)));
            rows.push(row);
        }
    }
    rows
}

fn residual_study(c: &ResidualStudyConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let study = scaling_study(&c.template, &c.epsilons)?;
    out.json("study.json", "residual_study", &study)?;
    let rows: Vec<Vec<f64>> = study
        .reports
        .iter()
        .zip(&study.sizes)
        .map(|(r, s)| {
            vec![
                r.epsilon,
                r.nu_h,
                r.delta,
                r.r_h1,
                r.r_h2,
                r.r_31,
                r.r_32,
                r.r_h2_scaled.unwrap_or(f64::NAN),
                s.layer_h,
                s.layer_3,
                s.interior,
                s.corrector,
            ]
        })
        .collect();
    let header = [
        "epsilon",
        "nu_h",
        "delta",
        "r_h1",
        "r_h2",
        "r_31",
        "r_32",
        "r_h2_scaled",
        "layer_h",
        "layer_3",
        "interior",
        "corrector",
    ];
    out.csv("residuals.csv", &header, rows)?;
    if !study.passed() {
        let failed: Vec<&str> = study
            .verdicts
            .iter()
            .filter(|v| !v.passed)
            .map(|v| v.name)
            .collect();
        eprintln!("scaling verdicts failed: {}", failed.join(", "));
    }
    Ok(())
}

fn check_times(times: &[f64]) -> Result<(), CliError> {
    if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(CliError::Config(
            "`times` must be a non-empty list of non-negative numbers".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct RossbyReport {
    region: Region,
    initial_energy: f64,
    initial_local_energy: f64,
    divergence_defect: f64,
    samples: Vec<RossbySample>,
}

#[derive(Serialize)]
struct RossbySample {
    time: f64,
    energy: f64,
    local_energy: f64,
    local_fraction: f64,
}

fn rossby(c: &RossbyConfig, out: &mut OutputDir) -> Result<(), CliError> {
    c.params.validate()?;
    check_times(&c.times)?;
    let state = SpectralState::from_streamfunction(&c.packet.streamfunction(c.grid), c.params)?;
    let region = c.packet.support(c.reach, &c.grid);
    let initial_local_energy = state.local_energy(&region)?;
    let evolved: Vec<SpectralState> = c
        .times
        .iter()
        .map(|&t| state.propagate(t))
        .collect::<Result<_, _>>()?;
    let samples: Vec<RossbySample> = evolved
        .iter()
        .map(|s| {
            let local = s.local_energy(&region)?;
            Ok(RossbySample {
                time: s.time(),
                energy: s.energy(),
                local_energy: local,
                local_fraction: local / initial_local_energy,
            })
        })
        .collect::<Result<_, betaplane::Error>>()?;
    out.csv(
        "energy.csv",
        &["time", "energy", "local_energy", "local_fraction"],
        samples
            .iter()
            .map(|s| [s.time, s.energy, s.local_energy, s.local_fraction]),
    )?;
    let report = RossbyReport {
        region,
        initial_energy: state.energy(),
        initial_local_energy,
        divergence_defect: state.divergence_defect(),
        samples,
    };
    out.json("report.json", "rossby_report", &report)?;
    if c.write_fields {
        out.csv(
            "velocity_initial.csv",
            &["x", "y", "u1", "u2"],
            horizontal_rows(&state.velocity()),
        )?;
        if let Some(last) = evolved.last() {
            out.csv(
                "velocity_final.csv",
                &["x", "y", "u1", "u2"],
                horizontal_rows(&last.velocity()),
            )?;
        }
    }
    Ok(())
}

fn initial_states(c: &RaysConfig) -> Result<Vec<RayState>, CliError> {
    if !(c.duration.is_finite() && c.duration > 0.0) {
        return Err(CliError::Config("`duration` must be positive".into()));
    }
    Ok(c.rays
        .iter()
        .map(|r| RayState::new(r.mode, r.y0, r.xi0, r.k3, r.k, r.beta))
        .collect::<Result<_, _>>()?)
}

#[derive(Serialize)]
struct RaySummary {
    initial: RayState,
    last: RayState,
    max_drift: f64,
    escape: EscapeRecord,
    final_weight: Option<f64>,
}

#[derive(Serialize)]
struct RaysReport {
    regime: Option<Regime>,
    rays: Vec<RaySummary>,
}

fn rays(c: &RaysConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let states = initial_states(c)?;
    let regime = c
        .damping
        .map(|d| regime(d.nu_h, d.epsilon, d.margin))
        .transpose()?;
    let runs: Vec<_> = states
        .par_iter()
        .map(|s| {
            let traj = integrate_ray(s, c.duration, &c.options)?;
            let weights = c.damping.map(|d| damping_weight(&traj, d.nu_h, d.epsilon));
            Ok((traj, weights))
        })
        .collect::<Result<_, betaplane::Error>>()?;
    let mut rows = Vec::new();
    let mut summaries = Vec::with_capacity(runs.len());
    for (n, (traj, weights)) in runs.iter().enumerate() {
        for (m, s) in traj.states.iter().enumerate() {
            let w = weights.as_ref().map_or(f64::NAN, |w| w[m]);
            rows.push([
                n as f64,
                s.time,
                s.y,
                s.xi,
                s.drift(),
                s.damping_integral,
                w,
            ]);
        }
        summaries.push(RaySummary {
            initial: states[n],
            last: *traj.last(),
            max_drift: traj.max_drift,
            escape: escape_diagnostics(
                traj,
                (c.y_range[0], c.y_range[1]),
                (c.fit_window[0], c.fit_window[1]),
            ),
            final_weight: weights.as_ref().and_then(|w| w.last().copied()),
        });
    }
    out.csv(
        "trajectories.csv",
        &["ray", "time", "y", "xi", "drift", "xi2_integral", "weight"],
        rows,
    )?;
    out.json(
        "report.json",
        "poincare_rays",
        &RaysReport {
            regime,
            rays: summaries,
        },
    )?;
    Ok(())
}

fn thermocline(c: &ThermoclineConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let study = convergence_study(&c.setup, &c.epsilons)?;
    out.json("study.json", "thermocline_study", &study)?;
    out.csv(
        "errors.csv",
        &[
            "epsilon",
            "l2_error",
            "dz_error",
            "total",
            "iterations",
            "residual",
            "max_principle_defect",
        ],
        study.entries.iter().map(|e| {
            [
                e.epsilon,
                e.l2_error,
                e.dz_error,
                e.total(),
                e.iterations as f64,
                e.residual,
                e.max_principle_defect,
            ]
        }),
    )?;
    if c.write_fields {
        out.csv(
            "interior_temperature.csv",
            &["x", "y", "z", "theta"],
            volume_rows(study.interior.theta()),
        )?;
    }
    if !study.passed() {
        eprintln!("thermocline errors are not strictly decreasing in epsilon");
    }
    Ok(())
}

#[derive(Serialize)]
struct ScalesReport {
    parameters: Parameters,
    vertical_velocity: f64,
}

fn scales(c: &ScalesConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let parameters = nondimensionalize(&c.scales)?;
    out.json(
        "parameters.json",
        "scales",
        &ScalesReport {
            parameters,
            vertical_velocity: c.scales.vertical_velocity(),
        },
    )
}
