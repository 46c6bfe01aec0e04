//! Integrating the time-dependent laboratory-frame Hamiltonian of one atom.
//!
//! The populations are frame independent, so they track the rotating-frame run.

use dissipative_cooling::dynamics::{integrate, reset_operators, IntegratorOptions, LabFrame};
use dissipative_cooling::error::Result;
use dissipative_cooling::linalg::{real, zeros};
use dissipative_cooling::state::DensityMatrix;
use dissipative_cooling::system::{ground_embedding, interaction_picture_hamiltonian, DecaySpec, LaserSpec, SystemSpec};

pub fn run_example() -> Result<()> {
    let mut h = zeros(2, 2);
    h[(0, 0)] = real(-3.0);
    let spec = SystemSpec::new(1, 0.5, 30.0, h, DecaySpec::uniform(1.0), vec![LaserSpec::new(1.0, 0.0)?])?;
    let embed = ground_embedding(1);
    let rho0 = DensityMatrix::new(&embed * DensityMatrix::maximally_mixed(2).matrix() * embed.adjoint())?;
    let ops = reset_operators(&spec);
    let opts = IntegratorOptions::new(3.0, 5e-4).sampled(0.5);

    let lab = integrate(&LabFrame::new(&spec)?, &ops, &rho0, &opts)?;
    let rot = integrate(&interaction_picture_hamiltonian(&spec)?, &ops, &rho0, &opts)?;
    println!("{:>5} {:>12} {:>12}", "t", "p(g0) lab", "p(g0) rot");
    for k in 0..lab.len() {
        println!("{:5.2} {:12.8} {:12.8}", lab.times[k], lab.states[k].matrix()[(0, 0)].re, rot.states[k].matrix()[(0, 0)].re);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
