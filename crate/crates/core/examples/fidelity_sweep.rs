//! Stationary fidelity over Rabi frequency and qubit splitting, simulated and
//! from the closed form, written as CSV to stdout.

use dissipative_cooling::error::Result;
use dissipative_cooling::scenarios::sweep_fidelity_vs_detuning;

pub fn run_example() -> Result<()> {
    let deltas: Vec<f64> = (0..=10).map(|k| 5.0 * k as f64).collect();
    let table = sweep_fidelity_vs_detuning(&[0.25, 0.5, 1.0, 2.0], &deltas, 1.0, 4)?;
    let names: Vec<&str> = table.columns.iter().map(|c| c.name.as_str()).collect();
    println!("{}", names.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.8}")).collect();
        println!("{}", cells.join(","));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
