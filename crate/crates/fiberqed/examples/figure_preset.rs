//! Drive the scenario layer directly: run a figure preset and write its
//! CSV table, then read it back.
//!
//! Run with: cargo run --release --example figure_preset

use fiberqed::scenarios::{cmd_figure, ModeCache, ResultTable};

fn main() -> fiberqed::Result<()> {
    let cache = ModeCache::default();
    let table = cmd_figure("fig12", &cache)?;
    let path = std::env::temp_dir().join("fiberqed_fig12.csv");
    table.write_to(&path)?;
    println!(
        "wrote {} rows x {} columns to {}",
        table.rows.len(),
        table.columns.len(),
        path.display()
    );

    let back = ResultTable::parse(&std::fs::read_to_string(&path)?)?;
    assert_eq!(table, back);
    println!("round-trip parse OK");

    let t = back.column("t").unwrap();
    let p1 = back.column("psi1_rho_exc_1").unwrap();
    let p2 = back.column("psi1_rho_exc_2").unwrap();
    println!();
    println!("t (1/g0)   rho_exc_1   rho_exc_2   (initial state: atom 1 excited)");
    for i in (0..t.len()).step_by(t.len() / 10) {
        println!("{:7.2}    {:.5}     {:.5}", t[i], p1[i], p2[i]);
    }
    Ok(())
}
