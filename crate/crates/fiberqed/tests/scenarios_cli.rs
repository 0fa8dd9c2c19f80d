//! End-to-end checks of the scenario commands and the command-line
//! binary: table contracts, error paths, exit codes, determinism.

use fiberqed::scenarios::{
    cmd_ddi, cmd_dynamics, cmd_figure, cmd_modes, cmd_rates, ModeCache, ResultTable, RunConfig,
};
use std::process::Command;

fn pair_config(z21_nm: f64) -> RunConfig {
    RunConfig::from_json(&format!(
        r#"{{
            "atoms": [
                {{"r_nm": 250.0, "dipole": "sigma_plus_y"}},
                {{"r_nm": 250.0, "z_nm": {z21_nm}, "dipole": "sigma_plus_y"}}
            ]
        }}"#
    ))
    .unwrap()
}

#[test]
fn modes_default_single_row() {
    let cfg = RunConfig::from_json("{}").unwrap();
    let cache = ModeCache::default();
    let table = cmd_modes(&cfg, &cache).unwrap();
    assert_eq!(table.rows.len(), 1);
    let neff = table.rows[0][table.column_index("beta_over_k").unwrap()];
    assert!(neff > 1.0 && neff < 1.45);
    assert!(!table.failed[0]);
}

#[test]
fn modes_zero_samples_header_only() {
    let mut cfg = RunConfig::from_json("{}").unwrap();
    cfg.numerics.radial_samples = 0;
    let table = cmd_modes(&cfg, &ModeCache::default()).unwrap();
    assert!(table.rows.is_empty());
    assert!(!table.columns.is_empty());
}

#[test]
fn modes_multimode_error() {
    let cfg = RunConfig::from_json(r#"{"wavelength_nm": 300.0}"#).unwrap();
    match cmd_modes(&cfg, &ModeCache::default()) {
        Err(fiberqed::Error::Multimode { v }) => assert!(v >= 2.404),
        other => panic!("expected multimode error, got {other:?}"),
    }
}

#[test]
fn rates_row_identity_and_radial_decay() {
    // coincident atoms with the same dipole: gamma12 = gamma11 exactly
    let cfg = pair_config(0.0);
    let cache = ModeCache::default();
    let table = cmd_rates(&cfg, &cache).unwrap();
    let row = &table.rows[0];
    let g11 = row[table.column_index("gamma11_g").unwrap()];
    let re12 = row[table.column_index("re_gamma12_g").unwrap()];
    let im12 = row[table.column_index("im_gamma12_g").unwrap()];
    assert!((g11 - re12).abs() < 1e-12 && im12.abs() < 1e-12);

    // guided rate falls monotonically toward zero with radial distance
    let mut swept = pair_config(0.0);
    swept.sweep = Some(
        serde_json::from_str(
            r#"{"parameter": "both_r_minus_a_nm", "start": 0.0, "stop": 1000.0, "n_points": 6}"#,
        )
        .unwrap(),
    );
    let table = cmd_rates(&swept, &cache).unwrap();
    let col = table.column("gamma11_g").unwrap();
    for w in col.windows(2) {
        assert!(w[1] < w[0], "guided rate not decreasing: {col:?}");
    }
    assert!(*col.last().unwrap() < 0.05 * col[0]);
}

#[test]
fn ddi_hermiticity_and_phase_columns() {
    let cache = ModeCache::default();
    let cfg = pair_config(320.0);
    let fwd = cmd_ddi(&cfg, &cache).unwrap();
    // swap the atoms: omega12 conjugates
    let mut swapped = cfg.clone();
    swapped.atoms.swap(0, 1);
    let bwd = cmd_ddi(&swapped, &cache).unwrap();
    let re_f = fwd.rows[0][fwd.column_index("re_omega12").unwrap()];
    let im_f = fwd.rows[0][fwd.column_index("im_omega12").unwrap()];
    let re_b = bwd.rows[0][bwd.column_index("re_omega12").unwrap()];
    let im_b = bwd.rows[0][bwd.column_index("im_omega12").unwrap()];
    assert!((re_f - re_b).abs() < 1e-10 && (im_f + im_b).abs() < 1e-10);

    // the phases of gamma12 and omega12 differ at a generic geometry
    let theta = fwd.rows[0][fwd.column_index("theta12").unwrap()];
    let phi = fwd.rows[0][fwd.column_index("phi12").unwrap()];
    assert!((theta - phi).abs() > 1e-3);
}

#[test]
fn ddi_flags_singular_row() {
    // coincident atoms: the free-space dipole-dipole coefficient diverges
    let cfg = pair_config(0.0);
    let table = cmd_ddi(&cfg, &ModeCache::default()).unwrap();
    assert!(table.failed[0]);
    assert!(table.rows[0][1].is_nan());
}

#[test]
fn dynamics_table_contract() {
    let mut cfg = pair_config(150.0);
    cfg.dynamics.t_end = 1.0;
    let table = cmd_dynamics(&cfg, true, &ModeCache::default()).unwrap();
    for col in [
        "t",
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
        "single_rho_exc_1",
        "single_p_gyd",
        "single_n_tot",
    ] {
        assert!(table.column_index(col).is_some(), "missing column {col}");
    }
    // P_tot = P_gyd + P_rad on every row
    let pg = table.column("p_gyd").unwrap();
    let pr = table.column("p_rad").unwrap();
    let pt = table.column("p_tot").unwrap();
    for i in 0..pt.len() {
        assert!((pt[i] - pg[i] - pr[i]).abs() < 1e-12);
    }
    // baseline single-atom flux never exceeds gamma11 at t = 0
    let single0 = table.rows[0][table.column_index("single_p_tot").unwrap()];
    assert!(single0 > 0.5 && single0 < 2.0);
}

#[test]
fn dynamics_sweep_summary() {
    let mut cfg = pair_config(150.0);
    cfg.dynamics.t_end = 2.0;
    cfg.sweep = Some(
        serde_json::from_str(
            r#"{"parameter": "z21_nm", "start": 100.0, "stop": 200.0, "n_points": 3}"#,
        )
        .unwrap(),
    );
    let table = cmd_dynamics(&cfg, false, &ModeCache::default()).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert!(table.column_index("n_tot").is_some());
    assert!(table.column_index("peak_concurrence").is_some());
}

#[test]
fn figure_preset_runs_and_round_trips() {
    let cache = ModeCache::default();
    let table = cmd_figure("fig12", &cache).unwrap();
    assert!(table.column_index("psi1_rho_exc_1").is_some());
    assert!(table.column_index("psi2_rho_exc_2").is_some());
    assert!(table.column_index("single_p_gyd").is_some());
    let text = table.emit();
    let back = ResultTable::parse(&text).unwrap();
    assert_eq!(table, back);
}

#[test]
fn deterministic_output() {
    let cfg = pair_config(150.0);
    let a = cmd_rates(&cfg, &ModeCache::default()).unwrap().emit();
    let b = cmd_rates(&cfg, &ModeCache::new(false)).unwrap().emit();
    assert_eq!(a, b, "cache on/off must not change results");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fiberqed"))
}

#[test]
fn cli_modes_to_stdout() {
    let dir = std::env::temp_dir().join("fiberqed_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("cfg.json");
    std::fs::write(&cfg_path, "{}").unwrap();
    let out = bin()
        .args(["modes", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let table = ResultTable::parse(&text).unwrap();
    assert_eq!(table.rows.len(), 1);
}

#[test]
fn cli_exit_codes() {
    let dir = std::env::temp_dir().join("fiberqed_cli_test_codes");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("multimode.json");
    std::fs::write(&cfg_path, r#"{"wavelength_nm": 300.0}"#).unwrap();
    let out = bin()
        .args(["modes", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "multimode is a solver error");

    let out = bin().args(["figure", "fig99"]).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "unknown preset is a config error"
    );

    let bad_cfg = dir.join("bad.json");
    std::fs::write(&bad_cfg, "{ not json").unwrap();
    let out = bin()
        .args(["rates", "--config"])
        .arg(&bad_cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_out_dir_env() {
    let dir = std::env::temp_dir().join("fiberqed_cli_outdir");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("cfg.json");
    std::fs::write(&cfg_path, "{}").unwrap();
    let out = bin()
        .args(["modes", "--config"])
        .arg(&cfg_path)
        .args(["--out", "sub/result.csv"])
        .env("FIBERQED_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let written = dir.join("sub/result.csv");
    assert!(written.exists(), "output not placed under FIBERQED_OUT_DIR");
    ResultTable::parse(&std::fs::read_to_string(&written).unwrap()).unwrap();
}
