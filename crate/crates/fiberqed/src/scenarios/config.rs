//! Run configuration: a JSON document with lengths in nanometers and rates
//! in γ0 units. Geometry defaults follow the standard nanofiber baseline
//! (a = 250 nm, n1 = 1.45, n2 = 1, λ0 = 852 nm); everything else is
//! explicit.

use crate::coupling::{AtomSpec, Numerics};
use crate::dynamics::InitialState;
use crate::guided::FiberSpec;
use crate::linalg::zero4;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const NM: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FiberConfig {
    pub radius_nm: f64,
    pub n1: f64,
    pub n2: f64,
}

impl Default for FiberConfig {
    fn default() -> Self {
        FiberConfig {
            radius_nm: 250.0,
            n1: 1.45,
            n2: 1.0,
        }
    }
}

/// Dipole direction: a named preset or explicit complex Cartesian
/// components as [re, im] pairs. Explicit components are normalized.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DipoleSpec {
    Named(String),
    Components([[f64; 2]; 3]),
}

impl DipoleSpec {
    pub fn to_cartesian(&self) -> Result<[Complex64; 3]> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            DipoleSpec::Named(name) => match name.as_str() {
                "sigma_plus_y" => Ok([
                    Complex64::new(0.0, s),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(-s, 0.0),
                ]),
                "sigma_minus_y" => Ok([
                    Complex64::new(0.0, s),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(s, 0.0),
                ]),
                "x" => Ok([
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                ]),
                "y" => Ok([
                    Complex64::new(0.0, 0.0),
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, 0.0),
                ]),
                "z" => Ok([
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(1.0, 0.0),
                ]),
                other => Err(Error::Config(format!("unknown dipole preset '{other}'"))),
            },
            DipoleSpec::Components(c) => {
                let v = [
                    Complex64::new(c[0][0], c[0][1]),
                    Complex64::new(c[1][0], c[1][1]),
                    Complex64::new(c[2][0], c[2][1]),
                ];
                let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(Error::Config("dipole components must be nonzero".into()));
                }
                Ok([v[0] / norm, v[1] / norm, v[2] / norm])
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub r_nm: f64,
    #[serde(default)]
    pub phi_rad: f64,
    #[serde(default)]
    pub z_nm: f64,
    pub dipole: DipoleSpec,
}

impl AtomConfig {
    pub fn to_atom(&self) -> Result<AtomSpec> {
        AtomSpec::new(
            self.r_nm * NM,
            self.phi_rad,
            self.z_nm * NM,
            self.dipole.to_cartesian()?,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialStateConfig {
    #[default]
    Psi1,
    Psi2,
    Sym,
    Asym,
    SingleExcited,
    Custom {
        /// 4x4 density matrix over {|++>, |+->, |-+>, |-->}, entries as
        /// [re, im] pairs, row-major.
        rho: Vec<Vec<[f64; 2]>>,
    },
}

impl InitialStateConfig {
    pub fn to_initial_state(&self) -> Result<InitialState> {
        Ok(match self {
            InitialStateConfig::Psi1 => InitialState::Psi1,
            InitialStateConfig::Psi2 => InitialState::Psi2,
            InitialStateConfig::Sym => InitialState::Sym,
            InitialStateConfig::Asym => InitialState::Asym,
            InitialStateConfig::SingleExcited => InitialState::SingleExcited,
            InitialStateConfig::Custom { rho } => {
                if rho.len() != 4 || rho.iter().any(|row| row.len() != 4) {
                    return Err(Error::Config("custom rho must be 4x4".into()));
                }
                let mut m = zero4();
                for i in 0..4 {
                    for j in 0..4 {
                        m[i][j] = Complex64::new(rho[i][j][0], rho[i][j][1]);
                    }
                }
                InitialState::Custom(m)
            }
        })
    }
}

/// The coordinate a sweep varies (lengths in nanometers).
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Atom1RNm,
    Atom2RNm,
    BothRNm,
    Atom1RMinusANm,
    Atom2RMinusANm,
    BothRMinusANm,
    Atom1ZNm,
    Atom2ZNm,
    /// Axial separation z2 - z1, moving atom 2.
    Z21Nm,
}

impl SweepParameter {
    pub fn column_name(&self) -> &'static str {
        match self {
            SweepParameter::Atom1RNm => "r1_nm",
            SweepParameter::Atom2RNm => "r2_nm",
            SweepParameter::BothRNm => "r_nm",
            SweepParameter::Atom1RMinusANm => "r1_minus_a_nm",
            SweepParameter::Atom2RMinusANm => "r2_minus_a_nm",
            SweepParameter::BothRMinusANm => "r_minus_a_nm",
            SweepParameter::Atom1ZNm => "z1_nm",
            SweepParameter::Atom2ZNm => "z2_nm",
            SweepParameter::Z21Nm => "z21_nm",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub n_points: usize,
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        let n = self.n_points;
        (0..n)
            .map(|i| {
                if n == 1 {
                    self.start
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    /// End time in units of 1/γ0.
    pub t_end: f64,
    /// Step size in units of 1/γ0.
    pub dt: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            t_end: 10.0,
            dt: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub m_cap: i32,
    pub m_start: i32,
    pub beta_nodes: usize,
    pub beta_rel_tol: f64,
    pub beta_endpoint_eps: f64,
    pub max_beta_doublings: usize,
    /// Radial samples emitted by the modes command.
    pub radial_samples: usize,
    /// Record every n-th integrator step in dynamics tables.
    pub record_stride: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let num = Numerics::default();
        NumericsConfig {
            m_cap: num.m_cap,
            m_start: num.m_start,
            beta_nodes: num.beta_nodes,
            beta_rel_tol: num.beta_rel_tol,
            beta_endpoint_eps: num.beta_endpoint_eps,
            max_beta_doublings: num.max_beta_doublings,
            radial_samples: 1,
            record_stride: 10,
        }
    }
}

impl NumericsConfig {
    pub fn to_numerics(&self) -> Numerics {
        Numerics {
            beta_nodes: self.beta_nodes,
            beta_rel_tol: self.beta_rel_tol,
            beta_endpoint_eps: self.beta_endpoint_eps,
            max_beta_doublings: self.max_beta_doublings,
            m_start: self.m_start,
            m_cap: self.m_cap,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: Option<String>,
}

/// One reproducible run: geometry, atoms, state, sweep, integrator, and
/// numerics.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub fiber: FiberConfig,
    pub wavelength_nm: Option<f64>,
    pub atoms: Vec<AtomConfig>,
    pub initial_state: InitialStateConfig,
    pub sweep: Option<SweepConfig>,
    pub dynamics: DynamicsConfig,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fiber.radius_nm > 0.0) {
            return Err(Error::Config("fiber radius must be positive".into()));
        }
        if let Some(wl) = self.wavelength_nm {
            if !(wl > 0.0) {
                return Err(Error::Config("wavelength must be positive".into()));
            }
        }
        if self.atoms.len() > 2 {
            return Err(Error::Config("at most two atoms are supported".into()));
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if atom.r_nm < self.fiber.radius_nm {
                return Err(Error::Config(format!(
                    "atom {} lies inside the fiber (r = {} nm < a = {} nm)",
                    i + 1,
                    atom.r_nm,
                    self.fiber.radius_nm
                )));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.n_points < 2 {
                return Err(Error::Config("sweep needs n_points >= 2".into()));
            }
        }
        if !(self.dynamics.t_end > 0.0 && self.dynamics.dt > 0.0) {
            return Err(Error::Config(
                "dynamics t_end and dt must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn fiber_spec(&self) -> Result<FiberSpec> {
        FiberSpec::new(self.fiber.radius_nm * NM, self.fiber.n1, self.fiber.n2)
    }

    pub fn omega0(&self) -> f64 {
        let wl = self.wavelength_nm.unwrap_or(852.0) * NM;
        2.0 * std::f64::consts::PI * crate::constants::C / wl
    }

    pub fn atom_specs(&self) -> Result<Vec<AtomSpec>> {
        self.atoms.iter().map(|a| a.to_atom()).collect()
    }

    /// New configuration with the sweep coordinate set to `value` (nm).
    pub fn with_sweep_value(&self, param: SweepParameter, value: f64) -> RunConfig {
        let mut cfg = self.clone();
        let a = cfg.fiber.radius_nm;
        match param {
            SweepParameter::Atom1RNm => cfg.atoms[0].r_nm = value,
            SweepParameter::Atom2RNm => cfg.atoms[1].r_nm = value,
            SweepParameter::BothRNm => {
                for atom in cfg.atoms.iter_mut() {
                    atom.r_nm = value;
                }
            }
            SweepParameter::Atom1RMinusANm => cfg.atoms[0].r_nm = a + value,
            SweepParameter::Atom2RMinusANm => cfg.atoms[1].r_nm = a + value,
            SweepParameter::BothRMinusANm => {
                for atom in cfg.atoms.iter_mut() {
                    atom.r_nm = a + value;
                }
            }
            SweepParameter::Atom1ZNm => cfg.atoms[0].z_nm = value,
            SweepParameter::Atom2ZNm => cfg.atoms[1].z_nm = value,
            SweepParameter::Z21Nm => cfg.atoms[1].z_nm = cfg.atoms[0].z_nm + value,
        }
        cfg
    }

    /// Hash of the physics-relevant configuration (everything except
    /// output), as a short hex string.
    pub fn config_hash(&self) -> String {
        #[derive(Serialize)]
        struct PhysicsView<'a> {
            fiber: &'a FiberConfig,
            wavelength_nm: &'a Option<f64>,
            atoms: &'a Vec<AtomConfig>,
            initial_state: &'a InitialStateConfig,
            sweep: &'a Option<SweepConfig>,
            dynamics: &'a DynamicsConfig,
            numerics: &'a NumericsConfig,
        }
        let view = PhysicsView {
            fiber: &self.fiber,
            wavelength_nm: &self.wavelength_nm,
            atoms: &self.atoms,
            initial_state: &self.initial_state,
            sweep: &self.sweep,
            dynamics: &self.dynamics,
            numerics: &self.numerics,
        };
        let canonical = serde_json::to_string(&view).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}
