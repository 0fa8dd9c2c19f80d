//! Dipole-dipole interaction coefficients: the guided pole-formula value,
//! the scaled free-space radiation estimate, and the principal-value
//! verification oracle at one separation.
//!
//! Run with: cargo run --release --example dipole_dipole

use fiberqed::coupling::{compute_coupling, omega_guided_pv, AtomSpec, Numerics, PvTaper};
use fiberqed::guided::FiberSpec;

fn main() -> fiberqed::Result<()> {
    let fiber = FiberSpec::new(250e-9, 1.45, 1.0)?;
    let omega0 = 2.0 * std::f64::consts::PI * fiberqed::constants::C / 852e-9;
    let num = Numerics::default();
    let a = fiber.radius;

    println!("z21 (nm)   Re O12_g    Im O12_g    O12_r       O12_vac     |O12|");
    for z_nm in [100.0, 300.0, 500.0, 1000.0, 2000.0] {
        let atoms = [
            AtomSpec::sigma_plus_y(a, 0.0, 0.0)?,
            AtomSpec::sigma_plus_y(a, 0.0, z_nm * 1e-9)?,
        ];
        let co = compute_coupling(&fiber, omega0, &atoms, &num)?;
        println!(
            "{z_nm:7.0}    {:+.5}    {:+.5}    {:+.5}    {:+.5}    {:.5}",
            co.omega_g12.re,
            co.omega_g12.im,
            co.omega_r12.re,
            co.omega_vac12.re,
            co.omega12.norm()
        );
    }

    // cross-check the pole formula against the windowed principal value
    let atoms = [
        AtomSpec::sigma_plus_y(a, 0.0, 0.0)?,
        AtomSpec::sigma_plus_y(a, 0.0, 1000e-9)?,
    ];
    let co = compute_coupling(&fiber, omega0, &atoms, &num)?;
    let w = 0.65 * omega0;
    let pv = omega_guided_pv(
        &fiber,
        omega0,
        &atoms[0],
        &atoms[1],
        (omega0 - w, omega0 + w),
        500,
        PvTaper::EdgeCorrected,
    )?;
    println!();
    println!(
        "pole formula at 1000 nm : ({:+.5}, {:+.5})",
        co.omega_g12.re, co.omega_g12.im
    );
    println!("PV oracle at 1000 nm    : ({:+.5}, {:+.5})", pv.re, pv.im);
    println!(
        "relative difference     : {:.2}%",
        100.0 * (pv - co.omega_g12).norm() / co.omega_g12.norm()
    );
    Ok(())
}
