//! Directional decay rates of a single circularly polarized atom near the
//! fiber: emission into guided modes is strongly asymmetric between the
//! two propagation directions, emission into radiation modes much less so.
//!
//! Run with: cargo run --release --example decay_rates

use fiberqed::coupling::{gamma_guided, gamma_radiation_matrix, AtomSpec, Numerics};
use fiberqed::guided::{solve_eigenvalue, FiberSpec};

fn main() -> fiberqed::Result<()> {
    let fiber = FiberSpec::new(250e-9, 1.45, 1.0)?;
    let omega0 = 2.0 * std::f64::consts::PI * fiberqed::constants::C / 852e-9;
    let mode = solve_eigenvalue(&fiber, omega0)?;
    let num = Numerics::default();

    println!("single sigma+ atom, rates in units of gamma0");
    println!("r - a (nm)   g+        g-        g_tot     r+        r-        r_tot     total");
    for dr_nm in [0.0, 100.0, 200.0, 400.0, 800.0] {
        let atom = AtomSpec::sigma_plus_y(fiber.radius + dr_nm * 1e-9, 0.0, 0.0)?;
        let g = gamma_guided(&mode, &atom, &atom)?;
        let rad = gamma_radiation_matrix(&fiber, omega0, std::slice::from_ref(&atom), &num)?;
        let (rp, rm) = (rad.dir.plus[0][0].re, rad.dir.minus[0][0].re);
        println!(
            "{:8.0}   {:.5}   {:.5}   {:.5}   {:.5}   {:.5}   {:.5}   {:.5}",
            dr_nm,
            g.plus.re,
            g.minus.re,
            g.total().re,
            rp,
            rm,
            rp + rm,
            g.total().re + rp + rm
        );
    }
    Ok(())
}
