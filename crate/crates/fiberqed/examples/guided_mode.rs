//! Solve the fundamental guided mode of the baseline nanofiber and print
//! its parameters and the radial decay of the evanescent profile.
//!
//! Run with: cargo run --example guided_mode

use fiberqed::guided::{solve_eigenvalue, FiberSpec};

fn main() -> fiberqed::Result<()> {
    let fiber = FiberSpec::new(250e-9, 1.45, 1.0)?;
    let omega0 = 2.0 * std::f64::consts::PI * fiberqed::constants::C / 852e-9;

    let mode = solve_eigenvalue(&fiber, omega0)?;
    println!("V parameter        : {:.6}", fiber.v_parameter(omega0));
    println!("effective index    : {:.9}", mode.beta / mode.k);
    println!(
        "group index        : {:.9}",
        mode.beta_prime * fiberqed::constants::C
    );
    println!("h a                : {:.6}", mode.h * fiber.radius);
    println!("q a                : {:.6}", mode.q * fiber.radius);
    println!("s parameter        : {:.6}", mode.s);
    println!();
    println!("r - a (nm)   |e_r|        |e_phi|      |e_z|");
    for i in 0..8 {
        let dr = i as f64 * 100e-9;
        let e = mode.profile_base(fiber.radius + dr)?;
        println!(
            "{:8.0}     {:.4e}   {:.4e}   {:.4e}",
            dr * 1e9,
            e[0].norm(),
            e[1].norm(),
            e[2].norm()
        );
    }
    Ok(())
}
