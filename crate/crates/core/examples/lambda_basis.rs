//! The λ-basis of two Heisenberg-coupled atoms: qubit eigenvalues, laser
//! detunings and the cooling-condition margin.

use dissipative_cooling::error::Result;
use dissipative_cooling::scenarios::heisenberg_interaction;
use dissipative_cooling::system::{
    build_lambda_basis, choose_detunings, cooling_condition_margin, distinct_detunings, embed_interaction, DecaySpec,
    LaserSpec, SystemSpec,
};

pub fn run_example() -> Result<()> {
    let j = 5.0;
    let probe = SystemSpec::new(2, 0.0, 100.0, heisenberg_interaction(j), DecaySpec::uniform(1.0), vec![])?;
    let basis = build_lambda_basis(&probe)?;
    println!("qubit eigenvalues {:?}", basis.qubit_eigenvalues());

    let detunings = choose_detunings(&basis, &embed_interaction(&probe)?)?;
    println!("detunings per λ-state {detunings:?}");
    let distinct = distinct_detunings(&detunings);
    println!("distinct laser frequencies needed: {}", distinct.len());

    let driven = SystemSpec::new(
        2,
        0.0,
        100.0,
        heisenberg_interaction(j),
        DecaySpec::uniform(1.0),
        vec![LaserSpec::new(0.2, distinct[0])?],
    )?;
    println!("cooling-condition margin {:.4}", cooling_condition_margin(&basis, &driven));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
