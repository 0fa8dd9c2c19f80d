//! Radiative coupling of two two-level atoms near a vacuum-clad optical
//! nanofiber.
//!
//! The crate solves the HE11 guided-mode eigenvalue problem, constructs the
//! continuum of radiation modes, and from those mode functions computes the
//! single- and cross-atom decay coefficients, their directional components,
//! and the dipole-dipole interaction coefficients for atoms with arbitrary
//! complex dipoles. A fixed-step master-equation integrator produces
//! populations, directional guided-photon fluxes, photon numbers, and the
//! two-atom concurrence.
//!
//! All rates are reported relative to the free-space single-atom decay rate
//! `γ0`, so the dipole magnitude and field-unit constants never need numeric
//! values. Geometry is SI (meters, rad/s) at the API boundary; the
//! configuration layer speaks nanometers.
//!
//! Entry points:
//! - [`guided::solve_eigenvalue`] — HE11 mode of a [`guided::FiberSpec`]
//! - [`radiation::build_radiation_mode`] — one normalized radiation mode
//! - [`coupling::compute_coupling`] — the full γ/Ω ledger for an atom pair
//! - [`dynamics::evolve`] — master-equation trajectory with fluxes
//! - [`scenarios`] — config files, CSV tables, parameter sweeps, figure presets

pub mod constants;
pub mod coupling;
pub mod dynamics;
pub mod guided;
pub(crate) mod linalg;
pub mod quad;
pub mod radiation;
pub mod scenarios;
pub mod specialfn;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("fiber is multimode at this frequency (V = {v:.6} >= 2.405)")]
    Multimode { v: f64 },
    #[error("no guided-mode root in (n2 k, n1 k); is there index contrast?")]
    NoGuidedRoot,
    #[error("endpoint singularity: q*a = {qa:.3e} below 1e-8")]
    EndpointSingularity { qa: f64 },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("azimuthal mode sum not converged at |m| = {m_cap}")]
    MSumNotConverged { m_cap: i32 },
    #[error("integration failure at step {step} (t = {t:.6}): {what}")]
    Integration { step: usize, t: f64, what: String },
    #[error("invalid state: {0}")]
    State(String),
    #[error("chirality phase undefined: |gamma12| = 0")]
    PhaseUndefined,
    #[error("singular geometry: {0}")]
    SingularGeometry(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown figure preset: {0}")]
    UnknownFigure(String),
    #[error("table parse error: {0}")]
    TableParse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use guided::{solve_eigenvalue, FiberSpec, GuidedModeIndex, GuidedModeSolution, Sign};
