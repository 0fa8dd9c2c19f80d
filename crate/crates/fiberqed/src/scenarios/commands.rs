//! The run commands behind the CLI: mode tables, rate scans, dipole-dipole
//! scans, dynamics runs, and figure presets. Sweep rows are evaluated in a
//! worker pool over immutable config snapshots; output rows keep sweep
//! order.

use super::cache::ModeCache;
use super::config::{InitialStateConfig, RunConfig, SweepParameter};
use super::presets;
use super::table::ResultTable;
use crate::coupling::{
    compute_coupling_single, compute_coupling_with_mode, gamma_guided, gamma_radiation_matrix,
    CouplingCoefficients, Numerics,
};
use crate::dynamics::{build_initial_state, evolve_with_options, EvolveOptions, Trajectory};
use crate::guided::GuidedModeSolution;
use crate::{Error, Result};
use rayon::prelude::*;
use std::sync::Arc;

/// Which coefficient set drives a dynamics run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineKind {
    /// Full nanofiber coupling (guided + radiation).
    Fiber,
    /// Free-space vacuum coefficients only.
    FreeSpace,
    /// Fiber coefficients with atom 2 zeroed out.
    SingleAtom,
}

fn base_metadata(table: &mut ResultTable, cfg: &RunConfig, command: &str) {
    table.meta("command", command);
    table.meta("config_hash", cfg.config_hash());
    table.meta("engine_version", env!("CARGO_PKG_VERSION"));
    table.meta("beta_rel_tol", cfg.numerics.beta_rel_tol);
    table.meta("beta_nodes", cfg.numerics.beta_nodes);
    table.meta("m_cap", cfg.numerics.m_cap);
}

/// True for per-row failures that flag the row instead of aborting the run.
fn row_level(err: &Error) -> bool {
    matches!(
        err,
        Error::Quadrature(_)
            | Error::MSumNotConverged { .. }
            | Error::EndpointSingularity { .. }
            | Error::SingularGeometry(_)
    )
}

fn sweep_column_and_values(cfg: &RunConfig) -> (String, Vec<(Option<SweepParameter>, f64)>) {
    match &cfg.sweep {
        Some(sweep) => (
            sweep.parameter.column_name().to_string(),
            sweep
                .values()
                .into_iter()
                .map(|v| (Some(sweep.parameter), v))
                .collect(),
        ),
        None => ("row".to_string(), vec![(None, 0.0)]),
    }
}

fn resolve_row_config(cfg: &RunConfig, param: Option<SweepParameter>, value: f64) -> RunConfig {
    match param {
        Some(p) => cfg.with_sweep_value(p, value),
        None => cfg.clone(),
    }
}

/// Coupling coefficients for the row geometry (single- or two-atom).
fn coefficients_for(
    cfg: &RunConfig,
    mode: &GuidedModeSolution,
    num: &Numerics,
) -> Result<CouplingCoefficients> {
    let atoms = cfg.atom_specs()?;
    match atoms.len() {
        1 => compute_coupling_single(mode, &atoms[0], num),
        2 => compute_coupling_with_mode(mode, &[atoms[0], atoms[1]], num),
        n => Err(Error::Config(format!("need 1 or 2 atoms, got {n}"))),
    }
}

/// Guided-mode solution table with profile samples on a radial grid.
pub fn cmd_modes(cfg: &RunConfig, cache: &ModeCache) -> Result<ResultTable> {
    cfg.validate()?;
    let fiber = cfg.fiber_spec()?;
    let omega0 = cfg.omega0();
    let mode = cache.solve(&fiber, omega0)?;
    let v = fiber.v_parameter(omega0);
    let mut table = ResultTable::new(
        [
            "beta_over_k",
            "beta_per_m",
            "beta_prime_s_per_m",
            "h_per_m",
            "q_per_m",
            "s_param",
            "v_param",
            "norm_c",
            "r_nm",
            "im_e_r",
            "e_phi",
            "e_z",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    );
    base_metadata(&mut table, cfg, "modes");
    let n = cfg.numerics.radial_samples;
    let r_hi = fiber.radius + 6.0 / mode.q;
    for i in 0..n {
        let r = if n == 1 {
            fiber.radius
        } else {
            r_hi * i as f64 / (n - 1) as f64
        };
        let e = mode.profile_base(r)?;
        table.push_row(vec![
            mode.beta / mode.k,
            mode.beta,
            mode.beta_prime,
            mode.h,
            mode.q,
            mode.s,
            v,
            mode.norm_c,
            r / 1e-9,
            e[0].im,
            e[1].re,
            e[2].re,
        ]);
    }
    Ok(table)
}

/// Decay-rate scan: single-atom rates and (with two atoms) the cross-atom
/// coefficients, per direction, in γ0 units.
pub fn cmd_rates(cfg: &RunConfig, cache: &ModeCache) -> Result<ResultTable> {
    cfg.validate()?;
    let n_atoms = cfg.atoms.len();
    if n_atoms == 0 {
        return Err(Error::Config("rates needs one or two atoms".into()));
    }
    let fiber = cfg.fiber_spec()?;
    let omega0 = cfg.omega0();
    let mode = cache.solve(&fiber, omega0)?;
    let num = cfg.numerics.to_numerics();
    let (sweep_col, points) = sweep_column_and_values(cfg);

    let mut columns = vec![sweep_col];
    let single = [
        "gamma11_g",
        "gamma11_g_plus",
        "gamma11_g_minus",
        "gamma11_r",
        "gamma11_r_plus",
        "gamma11_r_minus",
        "gamma11_tot",
    ];
    columns.extend(single.iter().map(|s| s.to_string()));
    if n_atoms == 2 {
        let pair = [
            "gamma22_g",
            "gamma22_g_plus",
            "gamma22_g_minus",
            "gamma22_r",
            "gamma22_r_plus",
            "gamma22_r_minus",
            "gamma22_tot",
            "re_gamma12_g",
            "im_gamma12_g",
            "abs_gamma12_g",
            "abs_gamma12_g_plus",
            "abs_gamma12_g_minus",
            "re_gamma12_r",
            "im_gamma12_r",
            "abs_gamma12_r",
            "abs_gamma12_r_plus",
            "abs_gamma12_r_minus",
            "re_gamma12",
            "im_gamma12",
            "abs_gamma12",
            "phi12",
        ];
        columns.extend(pair.iter().map(|s| s.to_string()));
    }
    let n_cols = columns.len();
    let mut table = ResultTable::new(columns);
    base_metadata(&mut table, cfg, "rates");

    let mode = Arc::new(mode);
    let rows: Vec<Result<Vec<f64>>> = points
        .par_iter()
        .map(|(param, value)| {
            let row_cfg = resolve_row_config(cfg, *param, *value);
            row_cfg.validate()?;
            // decay coefficients only: well defined even for coincident
            // atoms, where the dipole-dipole coefficients diverge
            let atoms = row_cfg.atom_specs()?;
            let fiber = row_cfg.fiber_spec()?;
            let rad = gamma_radiation_matrix(&fiber, mode.omega, &atoms, &num)?;
            let g11 = gamma_guided(&mode, &atoms[0], &atoms[0])?;
            let rad_tot = rad.total();
            let mut row = vec![*value];
            row.extend_from_slice(&[
                g11.total().re,
                g11.plus.re,
                g11.minus.re,
                rad_tot[0][0].re,
                rad.dir.plus[0][0].re,
                rad.dir.minus[0][0].re,
                g11.total().re + rad_tot[0][0].re,
            ]);
            if n_atoms == 2 {
                let g22 = gamma_guided(&mode, &atoms[1], &atoms[1])?;
                let g12 = gamma_guided(&mode, &atoms[0], &atoms[1])?;
                let g12_tot = g12.total() + rad_tot[0][1];
                row.extend_from_slice(&[
                    g22.total().re,
                    g22.plus.re,
                    g22.minus.re,
                    rad_tot[1][1].re,
                    rad.dir.plus[1][1].re,
                    rad.dir.minus[1][1].re,
                    g22.total().re + rad_tot[1][1].re,
                    g12.total().re,
                    g12.total().im,
                    g12.total().norm(),
                    g12.plus.norm(),
                    g12.minus.norm(),
                    rad_tot[0][1].re,
                    rad_tot[0][1].im,
                    rad_tot[0][1].norm(),
                    rad.dir.plus[0][1].norm(),
                    rad.dir.minus[0][1].norm(),
                    g12_tot.re,
                    g12_tot.im,
                    g12_tot.norm(),
                    g12_tot.arg(),
                ]);
            }
            Ok(row)
        })
        .collect();

    for (outcome, (_, value)) in rows.into_iter().zip(&points) {
        match outcome {
            Ok(row) => table.push_row(row),
            Err(err) if row_level(&err) => {
                let mut row = vec![f64::NAN; n_cols];
                row[0] = *value;
                table.push_failed_row(row);
            }
            Err(err) => return Err(err),
        }
    }
    Ok(table)
}

/// Dipole-dipole coefficient scan (guided, radiation approximation,
/// free-space, and total), in γ0 units.
pub fn cmd_ddi(cfg: &RunConfig, cache: &ModeCache) -> Result<ResultTable> {
    cfg.validate()?;
    if cfg.atoms.len() != 2 {
        return Err(Error::Config("ddi needs exactly two atoms".into()));
    }
    let fiber = cfg.fiber_spec()?;
    let omega0 = cfg.omega0();
    let mode = Arc::new(cache.solve(&fiber, omega0)?);
    let num = cfg.numerics.to_numerics();
    let (sweep_col, points) = sweep_column_and_values(cfg);

    let mut columns = vec![sweep_col];
    let named = [
        "re_omega12_g",
        "im_omega12_g",
        "abs_omega12_g",
        "phase_omega12_g",
        "re_omega12_r",
        "im_omega12_r",
        "abs_omega12_r",
        "phase_omega12_r",
        "re_omega12_vac",
        "im_omega12_vac",
        "abs_omega12_vac",
        "phase_omega12_vac",
        "re_omega12",
        "im_omega12",
        "abs_omega12",
        "theta12",
        "phi12",
    ];
    columns.extend(named.iter().map(|s| s.to_string()));
    let n_cols = columns.len();
    let mut table = ResultTable::new(columns);
    base_metadata(&mut table, cfg, "ddi");

    let rows: Vec<Result<Vec<f64>>> = points
        .par_iter()
        .map(|(param, value)| {
            let row_cfg = resolve_row_config(cfg, *param, *value);
            row_cfg.validate()?;
            let coeffs = coefficients_for(&row_cfg, &mode, &num)?;
            Ok(vec![
                *value,
                coeffs.omega_g12.re,
                coeffs.omega_g12.im,
                coeffs.omega_g12.norm(),
                coeffs.omega_g12.arg(),
                coeffs.omega_r12.re,
                coeffs.omega_r12.im,
                coeffs.omega_r12.norm(),
                coeffs.omega_r12.arg(),
                coeffs.omega_vac12.re,
                coeffs.omega_vac12.im,
                coeffs.omega_vac12.norm(),
                coeffs.omega_vac12.arg(),
                coeffs.omega12.re,
                coeffs.omega12.im,
                coeffs.omega12.norm(),
                coeffs.phi_omega,
                coeffs.phi_gamma,
            ])
        })
        .collect();

    for (outcome, (_, value)) in rows.into_iter().zip(&points) {
        match outcome {
            Ok(row) => table.push_row(row),
            Err(err) if row_level(&err) => {
                let mut row = vec![f64::NAN; n_cols];
                row[0] = *value;
                table.push_failed_row(row);
            }
            Err(err) => return Err(err),
        }
    }
    Ok(table)
}

/// One dynamics run with the coefficients selected by `kind`.
pub fn dynamics_trajectory(
    cfg: &RunConfig,
    kind: EngineKind,
    state_override: Option<&InitialStateConfig>,
    cache: &ModeCache,
) -> Result<Trajectory> {
    let atoms = cfg.atom_specs()?;
    let omega0 = cfg.omega0();
    let num = cfg.numerics.to_numerics();
    let coeffs = match kind {
        EngineKind::FreeSpace => {
            if atoms.len() != 2 {
                return Err(Error::Config("free-space runs need two atoms".into()));
            }
            CouplingCoefficients::free_space(&[atoms[0], atoms[1]], omega0)?
        }
        EngineKind::Fiber | EngineKind::SingleAtom => {
            let fiber = cfg.fiber_spec()?;
            let mode = cache.solve(&fiber, omega0)?;
            let full = coefficients_for(cfg, &mode, &num)?;
            if kind == EngineKind::SingleAtom {
                full.single_atom_reduction()
            } else {
                full
            }
        }
    };
    let state_cfg = state_override.unwrap_or(&cfg.initial_state);
    let state_kind = if kind == EngineKind::SingleAtom {
        InitialStateConfig::SingleExcited.to_initial_state()?
    } else {
        state_cfg.to_initial_state()?
    };
    let state = build_initial_state(&state_kind, coeffs.phi_gamma)?;
    // Halve the step (scaling the record stride to keep the output grid)
    // until the stability bound holds; strong near-field dipole-dipole
    // coupling at small separations demands finer steps than the default.
    let gamma_max = crate::dynamics::stability_rate(&coeffs);
    let mut dt = cfg.dynamics.dt;
    let mut stride = cfg.numerics.record_stride.max(1);
    while gamma_max > 0.0 && dt > 0.01 / gamma_max {
        dt *= 0.5;
        stride *= 2;
    }
    evolve_with_options(
        &state,
        &coeffs,
        cfg.dynamics.t_end,
        dt,
        &EvolveOptions {
            record_stride: stride,
            ..Default::default()
        },
    )
}

fn trajectory_columns(prefix: &str) -> Vec<String> {
    [
        "rho_exc_1",
        "rho_exc_2",
        "p_plus",
        "p_minus",
        "p_gyd",
        "p_rad",
        "p_tot",
        "n_plus",
        "n_minus",
        "n_gyd",
        "n_rad",
        "n_tot",
        "concurrence",
    ]
    .iter()
    .map(|c| format!("{prefix}{c}"))
    .collect()
}

fn trajectory_row(traj: &Trajectory, i: usize) -> Vec<f64> {
    vec![
        traj.rho_exc_1[i],
        traj.rho_exc_2[i],
        traj.p_plus[i],
        traj.p_minus[i],
        traj.p_gyd[i],
        traj.p_rad[i],
        traj.p_tot[i],
        traj.n_plus[i],
        traj.n_minus[i],
        traj.n_gyd[i],
        traj.n_rad[i],
        traj.n_tot[i],
        traj.concurrence[i],
    ]
}

/// Master-equation dynamics. Without a sweep: the full trajectory as one
/// row per recorded time. With a sweep: one row per sweep point carrying
/// the end-of-run photon numbers and the peak concurrence.
pub fn cmd_dynamics(cfg: &RunConfig, baseline: bool, cache: &ModeCache) -> Result<ResultTable> {
    cfg.validate()?;
    if cfg.atoms.is_empty() {
        return Err(Error::Config("dynamics needs one or two atoms".into()));
    }
    match &cfg.sweep {
        None => {
            let traj = dynamics_trajectory(cfg, EngineKind::Fiber, None, cache)?;
            let mut columns = vec!["t".to_string()];
            columns.extend(trajectory_columns(""));
            let base = if baseline {
                let b = dynamics_trajectory(cfg, EngineKind::SingleAtom, None, cache)?;
                columns.extend(trajectory_columns("single_"));
                Some(b)
            } else {
                None
            };
            let mut table = ResultTable::new(columns);
            base_metadata(&mut table, cfg, "dynamics");
            for i in 0..traj.times.len() {
                let mut row = vec![traj.times[i]];
                row.extend(trajectory_row(&traj, i));
                if let Some(b) = &base {
                    row.extend(trajectory_row(b, i));
                }
                table.push_row(row);
            }
            Ok(table)
        }
        Some(sweep) => {
            let points: Vec<f64> = sweep.values();
            let param = sweep.parameter;
            let mut columns = vec![param.column_name().to_string()];
            let summary = [
                "n_plus",
                "n_minus",
                "n_gyd",
                "n_rad",
                "n_tot",
                "peak_concurrence",
            ];
            columns.extend(summary.iter().map(|s| s.to_string()));
            if baseline {
                columns.extend(
                    ["n_plus", "n_minus", "n_gyd", "n_rad", "n_tot"]
                        .iter()
                        .map(|s| format!("single_{s}")),
                );
            }
            let n_cols = columns.len();
            let mut table = ResultTable::new(columns);
            base_metadata(&mut table, cfg, "dynamics");

            let rows: Vec<Result<Vec<f64>>> = points
                .par_iter()
                .map(|value| {
                    let row_cfg = {
                        let mut c = cfg.with_sweep_value(param, *value);
                        c.sweep = None;
                        c
                    };
                    row_cfg.validate()?;
                    let traj = dynamics_trajectory(&row_cfg, EngineKind::Fiber, None, cache)?;
                    let last = traj.times.len() - 1;
                    let peak = traj.concurrence.iter().cloned().fold(0.0, f64::max);
                    let mut row = vec![
                        *value,
                        traj.n_plus[last],
                        traj.n_minus[last],
                        traj.n_gyd[last],
                        traj.n_rad[last],
                        traj.n_tot[last],
                        peak,
                    ];
                    if baseline {
                        let b = dynamics_trajectory(&row_cfg, EngineKind::SingleAtom, None, cache)?;
                        let lb = b.times.len() - 1;
                        row.extend_from_slice(&[
                            b.n_plus[lb],
                            b.n_minus[lb],
                            b.n_gyd[lb],
                            b.n_rad[lb],
                            b.n_tot[lb],
                        ]);
                    }
                    Ok(row)
                })
                .collect();
            for (outcome, value) in rows.into_iter().zip(&points) {
                match outcome {
                    Ok(row) => table.push_row(row),
                    Err(err) if row_level(&err) => {
                        let mut row = vec![f64::NAN; n_cols];
                        row[0] = *value;
                        table.push_failed_row(row);
                    }
                    Err(err) => return Err(err),
                }
            }
            Ok(table)
        }
    }
}

/// Expand a figure preset to its captioned parameter set and run it.
pub fn cmd_figure(figure_id: &str, cache: &ModeCache) -> Result<ResultTable> {
    let spec = presets::figure_spec(figure_id)?;
    match spec {
        presets::FigureSpec::Rates(cfg) => cmd_rates(&cfg, cache),
        presets::FigureSpec::Ddi(cfg) => cmd_ddi(&cfg, cache),
        presets::FigureSpec::DynamicsSet { base, variants } => {
            run_dynamics_set(&base, &variants, cache)
        }
        presets::FigureSpec::PhotonNumberScan { base, variants } => {
            run_photon_scan(&base, &variants, cache)
        }
    }
}

fn run_dynamics_set(
    base: &RunConfig,
    variants: &[presets::Variant],
    cache: &ModeCache,
) -> Result<ResultTable> {
    base.validate()?;
    let mut columns = vec!["t".to_string()];
    let mut trajs = Vec::new();
    for v in variants {
        let mut cfg = base.clone();
        if let Some(z21) = v.z21_nm {
            cfg = cfg.with_sweep_value(SweepParameter::Z21Nm, z21);
        }
        let traj = dynamics_trajectory(&cfg, v.engine, Some(&v.state), cache)?;
        columns.extend(trajectory_columns(&format!("{}_", v.prefix)));
        trajs.push(traj);
    }
    let mut table = ResultTable::new(columns);
    base_metadata(&mut table, base, "figure-dynamics");
    let n = trajs[0].times.len();
    for traj in &trajs {
        if traj.times.len() != n {
            return Err(Error::Config("variant grids differ".into()));
        }
    }
    for i in 0..n {
        let mut row = vec![trajs[0].times[i]];
        for traj in &trajs {
            row.extend(trajectory_row(traj, i));
        }
        table.push_row(row);
    }
    Ok(table)
}

fn run_photon_scan(
    base: &RunConfig,
    variants: &[presets::Variant],
    cache: &ModeCache,
) -> Result<ResultTable> {
    base.validate()?;
    let sweep = base
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("photon-number scan needs a sweep".into()))?;
    let points = sweep.values();
    let param = sweep.parameter;
    let mut columns = vec![param.column_name().to_string()];
    for v in variants {
        for c in ["n_plus", "n_minus", "n_gyd", "n_rad", "n_tot"] {
            columns.push(format!("{}_{c}", v.prefix));
        }
    }
    let n_cols = columns.len();
    let mut table = ResultTable::new(columns);
    base_metadata(&mut table, base, "figure-photon-scan");

    let rows: Vec<Result<Vec<f64>>> = points
        .par_iter()
        .map(|value| {
            let mut row_cfg = base.with_sweep_value(param, *value);
            row_cfg.sweep = None;
            row_cfg.validate()?;
            let mut row = vec![*value];
            for v in variants {
                let traj = dynamics_trajectory(&row_cfg, v.engine, Some(&v.state), cache)?;
                let last = traj.times.len() - 1;
                row.extend_from_slice(&[
                    traj.n_plus[last],
                    traj.n_minus[last],
                    traj.n_gyd[last],
                    traj.n_rad[last],
                    traj.n_tot[last],
                ]);
            }
            Ok(row)
        })
        .collect();
    for (outcome, value) in rows.into_iter().zip(&points) {
        match outcome {
            Ok(row) => table.push_row(row),
            Err(err) if row_level(&err) => {
                let mut row = vec![f64::NAN; n_cols];
                row[0] = *value;
                table.push_failed_row(row);
            }
            Err(err) => return Err(err),
        }
    }
    Ok(table)
}
