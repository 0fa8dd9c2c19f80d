//! Decay of one excited atom next to a ground-state atom: the guided
//! photons leave overwhelmingly in one direction along the fiber.
//!
//! Run with: cargo run --release --example directional_photons

use fiberqed::coupling::{compute_coupling, AtomSpec, Numerics};
use fiberqed::dynamics::{build_initial_state, evolve_with_options, EvolveOptions, InitialState};
use fiberqed::guided::FiberSpec;

fn main() -> fiberqed::Result<()> {
    let fiber = FiberSpec::new(250e-9, 1.45, 1.0)?;
    let omega0 = 2.0 * std::f64::consts::PI * fiberqed::constants::C / 852e-9;
    let atoms = [
        AtomSpec::sigma_plus_y(450e-9, 0.0, 0.0)?,
        AtomSpec::sigma_plus_y(450e-9, 0.0, 150e-9)?,
    ];
    let co = compute_coupling(&fiber, omega0, &atoms, &Numerics::default())?;
    let state = build_initial_state(&InitialState::Psi1, co.phi_gamma)?;
    let traj = evolve_with_options(
        &state,
        &co,
        20.0,
        1e-3,
        &EvolveOptions {
            record_stride: 200,
            ..Default::default()
        },
    )?;

    println!("t (1/g0)   rho_exc_1   rho_exc_2   P+          P-          N+       N-");
    for (i, t) in traj.times.iter().enumerate().step_by(10) {
        println!(
            "{t:7.2}    {:.5}     {:.5}     {:.3e}   {:.3e}   {:.4}   {:.4}",
            traj.rho_exc_1[i],
            traj.rho_exc_2[i],
            traj.p_plus[i],
            traj.p_minus[i],
            traj.n_plus[i],
            traj.n_minus[i]
        );
    }
    let last = traj.times.len() - 1;
    println!();
    println!(
        "emitted guided photons: N+ = {:.5}, N- = {:.5}, ratio = {:.1}",
        traj.n_plus[last],
        traj.n_minus[last],
        traj.n_plus[last] / traj.n_minus[last]
    );
    Ok(())
}
