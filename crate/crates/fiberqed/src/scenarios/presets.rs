//! Figure presets: captioned parameter sets expanded into runnable
//! configurations. Multi-curve figures come back as one table with a
//! column-group prefix per curve; scan figures default to their radial
//! panel (use the `a`/`b` suffix to pick a panel explicitly).

use super::commands::EngineKind;
use super::config::{
    AtomConfig, DipoleSpec, InitialStateConfig, RunConfig, SweepConfig, SweepParameter,
};
use crate::{Error, Result};

/// One curve of a multi-run figure.
#[derive(Clone, Debug)]
pub struct Variant {
    pub prefix: String,
    pub engine: EngineKind,
    pub state: InitialStateConfig,
    /// Override of the axial separation, nm.
    pub z21_nm: Option<f64>,
}

#[derive(Clone, Debug)]
pub enum FigureSpec {
    Rates(RunConfig),
    Ddi(RunConfig),
    DynamicsSet {
        base: RunConfig,
        variants: Vec<Variant>,
    },
    PhotonNumberScan {
        base: RunConfig,
        variants: Vec<Variant>,
    },
}

fn sigma_atom(r_nm: f64, z_nm: f64) -> AtomConfig {
    AtomConfig {
        r_nm,
        phi_rad: 0.0,
        z_nm,
        dipole: DipoleSpec::Named("sigma_plus_y".into()),
    }
}

fn base_config(atoms: Vec<AtomConfig>) -> RunConfig {
    RunConfig {
        atoms,
        ..Default::default()
    }
}

fn radial_sweep(param: SweepParameter) -> SweepConfig {
    SweepConfig {
        parameter: param,
        start: 0.0,
        stop: 1200.0,
        n_points: 61,
    }
}

fn axial_sweep(param: SweepParameter) -> SweepConfig {
    SweepConfig {
        parameter: param,
        start: 0.0,
        stop: 2000.0,
        n_points: 81,
    }
}

fn single_atom_scan(panel: char) -> Result<RunConfig> {
    let mut cfg = base_config(vec![sigma_atom(250.0, 0.0)]);
    cfg.sweep = Some(match panel {
        'a' => radial_sweep(SweepParameter::Atom1RMinusANm),
        'b' => axial_sweep(SweepParameter::Atom1ZNm),
        _ => return Err(Error::UnknownFigure(format!("panel {panel}"))),
    });
    Ok(cfg)
}

fn pair_scan(panel: char) -> Result<RunConfig> {
    let mut cfg = base_config(vec![sigma_atom(250.0, 0.0), sigma_atom(250.0, 0.0)]);
    cfg.sweep = Some(match panel {
        'a' => radial_sweep(SweepParameter::Atom2RMinusANm),
        'b' => axial_sweep(SweepParameter::Atom2ZNm),
        _ => return Err(Error::UnknownFigure(format!("panel {panel}"))),
    });
    Ok(cfg)
}

fn dynamics_pair(z21_nm: f64) -> RunConfig {
    base_config(vec![sigma_atom(450.0, 0.0), sigma_atom(450.0, z21_nm)])
}

fn psi_variants() -> Vec<Variant> {
    vec![
        Variant {
            prefix: "psi1".into(),
            engine: EngineKind::Fiber,
            state: InitialStateConfig::Psi1,
            z21_nm: None,
        },
        Variant {
            prefix: "psi2".into(),
            engine: EngineKind::Fiber,
            state: InitialStateConfig::Psi2,
            z21_nm: None,
        },
        Variant {
            prefix: "single".into(),
            engine: EngineKind::SingleAtom,
            state: InitialStateConfig::SingleExcited,
            z21_nm: None,
        },
    ]
}

fn sym_variants() -> Vec<Variant> {
    vec![
        Variant {
            prefix: "sym".into(),
            engine: EngineKind::Fiber,
            state: InitialStateConfig::Sym,
            z21_nm: None,
        },
        Variant {
            prefix: "asym".into(),
            engine: EngineKind::Fiber,
            state: InitialStateConfig::Asym,
            z21_nm: None,
        },
        Variant {
            prefix: "single".into(),
            engine: EngineKind::SingleAtom,
            state: InitialStateConfig::SingleExcited,
            z21_nm: None,
        },
    ]
}

fn concurrence_variants(z_values_nm: &[f64]) -> Vec<Variant> {
    let mut out = Vec::new();
    for &z in z_values_nm {
        let tag = if z >= 1000.0 {
            format!("z{:.0}um", z / 1000.0)
        } else {
            format!("z{z:.0}")
        };
        out.push(Variant {
            prefix: format!("{tag}_psi1"),
            engine: EngineKind::Fiber,
            state: InitialStateConfig::Psi1,
            z21_nm: Some(z),
        });
        out.push(Variant {
            prefix: format!("{tag}_psi2"),
            engine: EngineKind::Fiber,
            state: InitialStateConfig::Psi2,
            z21_nm: Some(z),
        });
        out.push(Variant {
            prefix: format!("{tag}_free"),
            engine: EngineKind::FreeSpace,
            state: InitialStateConfig::Psi1,
            z21_nm: Some(z),
        });
    }
    out
}

fn separation_scan(base_z21: f64, variants: Vec<Variant>) -> FigureSpec {
    let mut base = dynamics_pair(base_z21);
    base.sweep = Some(SweepConfig {
        parameter: SweepParameter::Z21Nm,
        start: 25.0,
        stop: 1000.0,
        n_points: 40,
    });
    FigureSpec::PhotonNumberScan { base, variants }
}

fn radial_photon_scan(variants: Vec<Variant>) -> FigureSpec {
    let mut base = dynamics_pair(150.0);
    base.sweep = Some(SweepConfig {
        parameter: SweepParameter::BothRMinusANm,
        start: 0.0,
        stop: 1200.0,
        n_points: 41,
    });
    FigureSpec::PhotonNumberScan { base, variants }
}

/// Expand a figure identifier (fig2 .. fig30, with optional a/b panel
/// suffix on the scan figures) into its parameter set.
pub fn figure_spec(figure_id: &str) -> Result<FigureSpec> {
    let id = figure_id.trim().to_ascii_lowercase();
    let canonical = id.strip_prefix("fig").unwrap_or(&id);
    let (num_str, panel) = match canonical.chars().last() {
        Some(c @ ('a' | 'b')) => (&canonical[..canonical.len() - 1], c),
        _ => (canonical, 'a'),
    };
    let num: u32 = num_str
        .parse()
        .map_err(|_| Error::UnknownFigure(figure_id.to_string()))?;
    match num {
        // single-atom decay rates (guided and radiation columns share a run)
        2 | 3 => Ok(FigureSpec::Rates(single_atom_scan(panel)?)),
        // cross-atom decay coefficients
        4..=8 => Ok(FigureSpec::Rates(pair_scan(panel)?)),
        // dipole-dipole coefficients on the same geometry
        9 | 11 => Ok(FigureSpec::Ddi(pair_scan(panel)?)),
        // free-space dipole-dipole coefficient vs separation (the first
        // 10 nm are omitted: the coefficient diverges at contact)
        10 => {
            let mut cfg = base_config(vec![sigma_atom(250.0, 0.0), sigma_atom(250.0, 0.0)]);
            cfg.sweep = Some(SweepConfig {
                parameter: SweepParameter::Z21Nm,
                start: 10.0,
                stop: 2000.0,
                n_points: 200,
            });
            Ok(FigureSpec::Ddi(cfg))
        }
        12..=14 => Ok(FigureSpec::DynamicsSet {
            base: dynamics_pair(150.0),
            variants: psi_variants(),
        }),
        15 | 16 => Ok(FigureSpec::DynamicsSet {
            base: dynamics_pair(100.0),
            variants: psi_variants(),
        }),
        17 | 18 => Ok(FigureSpec::DynamicsSet {
            base: dynamics_pair(960.0),
            variants: psi_variants(),
        }),
        19 => Ok(separation_scan(150.0, psi_variants())),
        20 => Ok(radial_photon_scan(psi_variants())),
        21 => Ok(FigureSpec::DynamicsSet {
            base: dynamics_pair(150.0),
            variants: concurrence_variants(&[100.0, 150.0, 960.0]),
        }),
        22 => Ok(FigureSpec::DynamicsSet {
            base: dynamics_pair(100_000.0),
            variants: concurrence_variants(&[100_000.0]),
        }),
        23..=25 => Ok(FigureSpec::DynamicsSet {
            base: dynamics_pair(125.0),
            variants: sym_variants(),
        }),
        26..=28 => Ok(FigureSpec::DynamicsSet {
            base: dynamics_pair(300.0),
            variants: sym_variants(),
        }),
        29 => Ok(separation_scan(125.0, sym_variants())),
        30 => Ok(radial_photon_scan(sym_variants())),
        _ => Err(Error::UnknownFigure(figure_id.to_string())),
    }
}
