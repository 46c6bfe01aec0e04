//! Cooling rate fitted from trajectories started in the excited qubit state,
//! next to the closed-form estimates.

use dissipative_cooling::error::Result;
use dissipative_cooling::scenarios::sweep_rate_vs_omega;

pub fn run_example() -> Result<()> {
    let table = sweep_rate_vs_omega(&[0.25, 0.5, 1.0], 20.0, 1.0, 3)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "omega", "limit", "formula", "fit");
    for r in &table.rows {
        println!("{:6.2} {:12.6} {:12.6} {:12.6}", r[0], r[1], r[2], r[3]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
