//! Stationary state of the driven one-qubit scheme against the closed form.
//!
//! `cargo run --release --example one_qubit_steady`

use dissipative_cooling::analysis::{analytic_steady_one_qubit, fidelity_formula, max_deviation, rate_report};
use dissipative_cooling::error::Result;
use dissipative_cooling::scenarios::{build_one_qubit_scenario, ScenarioConfig};

pub fn run_example() -> Result<()> {
    let (omega, delta_lambda) = (1.0, 10.0);
    let scenario = build_one_qubit_scenario(&ScenarioConfig::one_qubit(omega, delta_lambda))?;
    let rho = scenario.to_lambda(&scenario.steady_state()?);
    let exact = analytic_steady_one_qubit(omega, 1.0, delta_lambda)?;

    println!("stationary state in the λ-basis (real parts):");
    for r in 0..4 {
        let row: Vec<String> = (0..4).map(|c| format!("{:+.6}", rho[(r, c)].re)).collect();
        println!("  {}", row.join("  "));
    }
    println!("max deviation from closed form: {:.2e}", max_deviation(&rho, exact.matrix()));
    println!("fidelity numeric {:.10}", scenario.steady_fidelity()?);
    println!("fidelity formula {:.10}", fidelity_formula(omega, 1.0, delta_lambda));

    let report = rate_report(omega, 1.0, delta_lambda)?;
    println!("heating rate {:.6}, cooling rate {:.6}", report.heating_rate, report.cooling_rate);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
