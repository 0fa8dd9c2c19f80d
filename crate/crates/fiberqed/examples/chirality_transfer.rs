//! Phases of the collective coefficients and the direction-dependent
//! excitation-transfer coefficients of the phase-rotated master equation.
//!
//! Run with: cargo run --release --example chirality_transfer

use fiberqed::coupling::{compute_coupling, AtomSpec, Numerics};
use fiberqed::guided::FiberSpec;

fn main() -> fiberqed::Result<()> {
    let fiber = FiberSpec::new(250e-9, 1.45, 1.0)?;
    let omega0 = 2.0 * std::f64::consts::PI * fiberqed::constants::C / 852e-9;
    let num = Numerics::default();

    println!("z21 (nm)   phi_gamma   phi_omega   transfer 1->2   transfer 2->1   asymmetry");
    for z_nm in [50.0, 150.0, 300.0, 500.0, 960.0] {
        let atoms = [
            AtomSpec::sigma_plus_y(450e-9, 0.0, 0.0)?,
            AtomSpec::sigma_plus_y(450e-9, 0.0, z_nm * 1e-9)?,
        ];
        let co = compute_coupling(&fiber, omega0, &atoms, &num)?;
        let asym = (co.transfer_fwd - co.transfer_bwd)
            / (co.transfer_fwd.abs() + co.transfer_bwd.abs()).max(1e-300);
        println!(
            "{z_nm:7.0}    {:+.4}     {:+.4}     {:+.6}       {:+.6}       {:+.3}",
            co.phi_gamma, co.phi_omega, co.transfer_fwd, co.transfer_bwd, asym
        );
    }
    Ok(())
}
