//! Symmetric and antisymmetric superposition states: collective decay can
//! be faster or slower than a single atom, and the roles for guided and
//! radiation channels can even be opposite at the same separation.
//!
//! Run with: cargo run --release --example superradiance

use fiberqed::coupling::{compute_coupling, AtomSpec, Numerics};
use fiberqed::dynamics::{build_initial_state, evolve_with_options, EvolveOptions, InitialState};
use fiberqed::guided::FiberSpec;

fn run_pair(z21_nm: f64) -> fiberqed::Result<()> {
    let fiber = FiberSpec::new(250e-9, 1.45, 1.0)?;
    let omega0 = 2.0 * std::f64::consts::PI * fiberqed::constants::C / 852e-9;
    let atoms = [
        AtomSpec::sigma_plus_y(450e-9, 0.0, 0.0)?,
        AtomSpec::sigma_plus_y(450e-9, 0.0, z21_nm * 1e-9)?,
    ];
    let co = compute_coupling(&fiber, omega0, &atoms, &Numerics::default())?;
    let opts = EvolveOptions {
        record_stride: 100,
        ..Default::default()
    };
    let sym = evolve_with_options(
        &build_initial_state(&InitialState::Sym, co.phi_gamma)?,
        &co,
        5.0,
        1e-3,
        &opts,
    )?;
    let asym = evolve_with_options(
        &build_initial_state(&InitialState::Asym, co.phi_gamma)?,
        &co,
        5.0,
        1e-3,
        &opts,
    )?;
    let single = evolve_with_options(
        &build_initial_state(&InitialState::SingleExcited, 0.0)?,
        &co.single_atom_reduction(),
        5.0,
        1e-3,
        &opts,
    )?;

    println!("z21 = {z21_nm} nm");
    println!(
        "  initial guided flux    : sym {:.5}  single {:.5}  asym {:.5}",
        sym.p_gyd[0], single.p_gyd[0], asym.p_gyd[0]
    );
    println!(
        "  initial radiation flux : sym {:.5}  single {:.5}  asym {:.5}",
        sym.p_rad[0], single.p_rad[0], asym.p_rad[0]
    );
    let pop = |t: &fiberqed::dynamics::Trajectory, i: usize| t.rho_exc_1[i] + t.rho_exc_2[i];
    let mid = sym.times.len() / 2;
    println!(
        "  population at t = {:.1}  : sym {:.5}  single {:.5}  asym {:.5}",
        sym.times[mid],
        pop(&sym, mid),
        single.rho_exc_1[mid],
        pop(&asym, mid)
    );
    println!();
    Ok(())
}

fn main() -> fiberqed::Result<()> {
    // superradiant/subradiant for both channels
    run_pair(125.0)?;
    // guided and radiation roles reversed
    run_pair(300.0)?;
    Ok(())
}
