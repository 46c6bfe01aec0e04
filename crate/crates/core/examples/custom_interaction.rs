//! A user-defined interaction: a Heisenberg pair in a uniform field along z.
//! The field splits the triplet, so each excited eigenstate needs its own
//! laser frequency.
//!
//! With several frequencies there is no time-independent frame, so the run
//! uses the frame rotating with the bare transition: a spec with `ω = 0` and
//! `ω̃ ≈ 0`, whose drive then oscillates only at the detunings.

use dissipative_cooling::analysis::fidelity;
use dissipative_cooling::dynamics::{integrate, reset_operators, IntegratorOptions, LabFrame};
use dissipative_cooling::error::Result;
use dissipative_cooling::linalg::{identity, kron, pauli, real};
use dissipative_cooling::state::DensityMatrix;
use dissipative_cooling::system::{
    build_lambda_basis, choose_detunings, distinct_detunings, embed_interaction, ground_embedding, DecaySpec, LaserSpec,
    SystemSpec,
};

const BARE: f64 = 1e-9;

pub fn run_example() -> Result<()> {
    let (j, b) = (2.0, 0.7);
    let exchange = kron(&pauli::x(), &pauli::x()) + kron(&pauli::y(), &pauli::y()) + kron(&pauli::z(), &pauli::z());
    let field = kron(&pauli::z(), &identity(2)) + kron(&identity(2), &pauli::z());
    let interaction = exchange * real(j) + field * real(b);
    let probe = SystemSpec::new(2, 0.0, BARE, interaction.clone(), DecaySpec::uniform(1.0), vec![])?;
    let basis = build_lambda_basis(&probe)?;
    let detunings = distinct_detunings(&choose_detunings(&basis, &embed_interaction(&probe)?)?);
    println!("qubit eigenvalues {:?}", basis.qubit_eigenvalues());
    println!("laser detunings {detunings:?}");

    let lasers = detunings.iter().map(|&d| LaserSpec::new(0.3, d)).collect::<Result<Vec<_>>>()?;
    let spec = SystemSpec::new(2, 0.0, BARE, interaction, DecaySpec::uniform(1.0), lasers)?;
    let embed = ground_embedding(2);
    let rho0 = DensityMatrix::new(&embed * DensityMatrix::maximally_mixed(4).matrix() * embed.adjoint())?;
    let opts = IntegratorOptions::new(100.0, 0.02).sampled(20.0);
    let traj = integrate(&LabFrame::new(&spec)?, &reset_operators(&spec), &rho0, &opts)?;

    let target = basis.ground();
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        println!("t = {t:5.0}  fidelity {:.6}", fidelity(rho, &target)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
