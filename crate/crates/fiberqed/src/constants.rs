//! Physical constants (SI).
//!
//! Planck's constant and the dipole magnitude never appear: every reported
//! rate is normalized by the free-space decay rate γ0 and those factors
//! cancel.

/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 299_792_458.0;

/// Vacuum permeability, H/m.
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 1.0 / (MU0 * C * C);

/// Single-mode boundary of the fiber V parameter (first zero of J0).
pub const V_SINGLE_MODE: f64 = 2.404_825_557_695_773;

/// Common prefactor of the γ0-normalized rates: 3π c³ / (2 ω0²), to be
/// multiplied by β' for guided modes and by 1 for radiation modes.
pub fn rate_prefactor(omega0: f64) -> f64 {
    1.5 * std::f64::consts::PI * C * C * C / (omega0 * omega0)
}
