//! Cooling two Heisenberg-coupled atoms into the singlet, in the full
//! sixteen-level model and in the eight-state truncation.

use dissipative_cooling::analysis::FIDELITY;
use dissipative_cooling::error::Result;
use dissipative_cooling::scenarios::{build_two_qubit_scenario, ScenarioConfig};

pub fn run_example() -> Result<()> {
    let mut rows = Vec::new();
    for truncate in [false, true] {
        let mut cfg = ScenarioConfig::two_qubit(0.2, 5.0, truncate);
        cfg.t_max = 400.0;
        cfg.sample_interval = Some(50.0);
        let scenario = build_two_qubit_scenario(&cfg)?;
        let traj = scenario.evolve()?;
        rows.push((traj.times.clone(), traj.observable(FIDELITY).unwrap_or_default().to_vec()));
        println!("dim {:2}: steady fidelity {:.6}", scenario.dim(), scenario.steady_fidelity()?);
    }
    println!("{:>8} {:>10} {:>10}", "t", "full", "truncated");
    for (k, t) in rows[0].0.iter().enumerate() {
        println!("{t:8.1} {:10.6} {:10.6}", rows[0].1[k], rows[1].1[k]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
