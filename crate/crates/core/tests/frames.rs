//! A laboratory-frame run, mapped into the frame rotating with the laser,
//! must reproduce the time-independent interaction-picture run.

use dissipative_cooling::dynamics::{integrate, reset_operators, IntegratorOptions, LabFrame};
use dissipative_cooling::linalg::{max_abs, ComplexMatrix, C64};
use dissipative_cooling::scenarios::heisenberg_interaction;
use dissipative_cooling::state::DensityMatrix;
use dissipative_cooling::system::{
    configuration_of, interaction_picture_hamiltonian, DecaySpec, LaserSpec, SystemSpec,
};

/// `U(t) = exp(−i (ω P_g + (ω + ω_L) P_e) t)` summed over atoms.
fn rotating_frame(spec: &SystemSpec, detuning: f64, t: f64) -> ComplexMatrix {
    let n = spec.n_atoms();
    let laser = spec.transition_frequency() - detuning;
    let d = spec.dim();
    let mut u = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let energy: f64 = configuration_of(k, n)
            .iter()
            .map(|l| if l.is_excited() { spec.omega_g + laser } else { spec.omega_g })
            .sum();
        u[(k, k)] = C64::from_polar(1.0, -energy * t);
    }
    u
}

fn compare(spec: SystemSpec, rho0: DensityMatrix, t_max: f64) {
    let detuning = spec.lasers[0].detuning;
    let ops = reset_operators(&spec);
    let opts = IntegratorOptions::new(t_max, 2e-4).sampled(t_max / 4.0);
    let lab = integrate(&LabFrame::new(&spec).unwrap(), &ops, &rho0, &opts).unwrap();
    let h_i = interaction_picture_hamiltonian(&spec).unwrap();
    let rot = integrate(&h_i, &ops, &rho0, &opts).unwrap();
    for ((t, a), b) in lab.times.iter().zip(&lab.states).zip(&rot.states) {
        let u = rotating_frame(&spec, detuning, *t);
        let mapped = u.adjoint() * a.matrix() * &u;
        let dev = max_abs(&(mapped - b.matrix()));
        assert!(dev < 1e-7, "t = {t}: deviation {dev:.3e}");
    }
}

#[test]
fn one_atom_lab_frame_matches_rotating_frame() {
    let h = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(-3.0, 0.0), C64::new(0.0, 0.0)]));
    let spec = SystemSpec::new(1, 0.5, 30.0, h, DecaySpec::uniform(1.0), vec![LaserSpec::new(1.2, 0.0).unwrap()]).unwrap();
    let mut psi = nalgebra::DVector::from_element(4, C64::new(0.0, 0.0));
    psi[0] = C64::new(0.6, 0.0);
    psi[1] = C64::new(0.0, 0.8);
    compare(spec, DensityMatrix::pure(&psi).unwrap(), 4.0);
}

#[test]
fn two_atom_lab_frame_matches_rotating_frame() {
    let spec = SystemSpec::new(
        2,
        0.0,
        25.0,
        heisenberg_interaction(1.0),
        DecaySpec::uniform(1.0),
        vec![LaserSpec::new(0.8, 1.0).unwrap()],
    )
    .unwrap();
    let mut rho = ComplexMatrix::zeros(16, 16);
    for q in [0usize, 1, 4, 5] {
        rho[(q, q)] = C64::new(0.25, 0.0);
    }
    compare(spec, DensityMatrix::new(rho).unwrap(), 2.0);
}
