//! Physical model of `N` four-level atoms: qubit ground states `g0`, `g1`,
//! auxiliary excited states `e0`, `e1`, an interaction Hamiltonian acting on
//! the qubits, and a set of cooling lasers driving `g_j ↔ e_j`.
//!
//! Units have `ħ = 1`; energies and rates are measured in units of the decay
//! rate scale `Γ`, times in `1/Γ`.
//!
//! The atomic product basis is the canonical storage basis. Atom 1 is the most
//! significant factor and each atom is ordered `(g0, g1, e0, e1)`, so a
//! configuration `(l_1, …, l_N)` sits at `Σ_i l_i · 4^(N-i)`.
//!
//! Laser phases follow the positive-frequency convention: laser `k` with
//! frequency `ω_k = ω̃ − ω − Δ_k` contributes `(Ω/2) e^{−iω_k t} |e_j><g_j|`
//! plus its conjugate. In the frame rotating with `H_Free − Δ Σ_i P_e^(i)`
//! this becomes `(Ω/2)|e_j><g_j| + Δ P_e`, so a qubit eigenstate `|λ_k>`
//! is resonant with its excited partner exactly when `Δ = λ_k − <λ_{2^N+k}|H_Int|λ_{2^N+k}>`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{
    hermiticity_error, hermitian_eigen, identity, kron, real, zeros, ComplexMatrix, ComplexVector, C64,
    HERMITIAN_TOL, ONE,
};

/// Gap below which the ground state of the interaction counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Single-atom level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    G0,
    G1,
    E0,
    E1,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::G0, Level::G1, Level::E0, Level::E1];

    pub fn index(self) -> usize {
        match self {
            Level::G0 => 0,
            Level::G1 => 1,
            Level::E0 => 2,
            Level::E1 => 3,
        }
    }

    pub fn ground(j: usize) -> Level {
        [Level::G0, Level::G1][j]
    }

    pub fn excited(j: usize) -> Level {
        [Level::E0, Level::E1][j]
    }

    pub fn is_excited(self) -> bool {
        matches!(self, Level::E0 | Level::E1)
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "g0" => Ok(Level::G0),
            "g1" => Ok(Level::G1),
            "e0" => Ok(Level::E0),
            "e1" => Ok(Level::E1),
            _ => Err(Error::BadLabel(s.to_string())),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["g0", "g1", "e0", "e1"][self.index()])
    }
}

/// Index of a configuration in the `4^N` product basis.
pub fn configuration_index(levels: &[Level]) -> usize {
    levels.iter().fold(0, |acc, l| acc * 4 + l.index())
}

/// [`configuration_index`] from textual labels such as `["g1", "e0"]`.
pub fn atom_basis_index<S: AsRef<str>>(labels: &[S]) -> Result<usize> {
    let levels = labels
        .iter()
        .map(|s| s.as_ref().parse::<Level>())
        .collect::<Result<Vec<_>>>()?;
    Ok(configuration_index(&levels))
}

/// Levels of each atom for a product-basis index.
pub fn configuration_of(index: usize, n_atoms: usize) -> Vec<Level> {
    let mut levels = vec![Level::G0; n_atoms];
    let mut rest = index;
    for slot in levels.iter_mut().rev() {
        *slot = Level::ALL[rest % 4];
        rest /= 4;
    }
    levels
}

/// Full-space index of the qubit basis state `q` (atom 1 is the most significant bit).
pub fn qubit_to_full_index(q: usize, n_atoms: usize) -> usize {
    (0..n_atoms).fold(0, |acc, i| {
        let bit = (q >> (n_atoms - 1 - i)) & 1;
        acc * 4 + bit
    })
}

/// Isometry (`4^N × 2^N`) embedding the qubit space into the ground manifold.
pub fn ground_embedding(n_atoms: usize) -> ComplexMatrix {
    let (full, qubit) = (4usize.pow(n_atoms as u32), 1usize << n_atoms);
    let mut e = zeros(full, qubit);
    for q in 0..qubit {
        e[(qubit_to_full_index(q, n_atoms), q)] = ONE;
    }
    e
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with the 4×4 `op` acting on atom `atom` (0-based).
pub fn single_atom_operator(op: &ComplexMatrix, atom: usize, n_atoms: usize) -> ComplexMatrix {
    assert_eq!(op.shape(), (4, 4), "single-atom operators are 4×4");
    assert!(atom < n_atoms);
    let mut out = identity(1);
    for i in 0..n_atoms {
        out = if i == atom { kron(&out, op) } else { kron(&out, &identity(4)) };
    }
    out
}

/// `|to><from|` on a single atom.
pub fn transition(to: Level, from: Level) -> ComplexMatrix {
    let mut m = zeros(4, 4);
    m[(to.index(), from.index())] = ONE;
    m
}

/// One cooling laser. Every `g_j ↔ e_j` transition of every atom is driven
/// with the same Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserSpec {
    pub rabi: f64,
    pub detuning: f64,
}

impl LaserSpec {
    pub fn new(rabi: f64, detuning: f64) -> Result<Self> {
        if !rabi.is_finite() || rabi < 0.0 {
            return Err(Error::InvalidSpec(format!("Rabi frequency must be finite and non-negative, got {rabi}")));
        }
        if !detuning.is_finite() {
            return Err(Error::InvalidSpec(format!("detuning must be finite, got {detuning}")));
        }
        Ok(Self { rabi, detuning })
    }
}

/// Spontaneous decay rates `Γ_jk` for `|e_k> → |g_j>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySpec {
    rates: [[f64; 2]; 2],
}

impl DecaySpec {
    pub fn new(rates: [[f64; 2]; 2]) -> Result<Self> {
        if rates.iter().flatten().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidSpec(format!("decay rates must be finite and non-negative: {rates:?}")));
        }
        Ok(Self { rates })
    }

    /// Every channel at `total / 2`, so each excited level decays at `total`.
    pub fn symmetric(total: f64) -> Self {
        Self {
            rates: [[total / 2.0; 2]; 2],
        }
    }

    /// Every channel at `rate`, so each excited level decays at `2·rate`.
    ///
    /// This is the normalisation under which the closed-form one-qubit
    /// stationary state in [`crate::analysis`] holds with `Γ = rate`.
    pub fn uniform(rate: f64) -> Self {
        Self { rates: [[rate; 2]; 2] }
    }

    /// `Γ_jk`: rate from `|e_k>` into `|g_j>`.
    pub fn rate(&self, j: usize, k: usize) -> f64 {
        self.rates[j][k]
    }

    /// Total decay rate of `|e_k>`.
    pub fn total(&self, k: usize) -> f64 {
        self.rates[0][k] + self.rates[1][k]
    }

    /// Largest single-channel rate.
    pub fn channel_max(&self) -> f64 {
        self.rates.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// Full physical description of the atoms, their interaction and the lasers.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    n_atoms: usize,
    /// Energy `ω` shared by both ground levels.
    pub omega_g: f64,
    /// Energy `ω̃` shared by both excited levels.
    pub omega_e: f64,
    interaction: ComplexMatrix,
    pub decay: DecaySpec,
    pub lasers: Vec<LaserSpec>,
}

impl SystemSpec {
    pub fn new(
        n_atoms: usize,
        omega_g: f64,
        omega_e: f64,
        interaction: ComplexMatrix,
        decay: DecaySpec,
        lasers: Vec<LaserSpec>,
    ) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidSpec("at least one atom is required".into()));
        }
        let qd = 1usize << n_atoms;
        if interaction.shape() != (qd, qd) {
            return Err(Error::DimensionMismatch {
                context: "interaction Hamiltonian",
                expected: qd,
                found: interaction.nrows(),
            });
        }
        let dev = hermiticity_error(&interaction);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        if !(omega_e > omega_g) {
            return Err(Error::InvalidSpec(format!(
                "excited energy ω̃ = {omega_e} must exceed ground energy ω = {omega_g}"
            )));
        }
        Ok(Self {
            n_atoms,
            omega_g,
            omega_e,
            interaction,
            decay,
            lasers,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Dimension of the qubit (ground) manifold, `2^N`.
    pub fn qubit_dim(&self) -> usize {
        1 << self.n_atoms
    }

    /// Dimension of the full atomic space, `4^N`.
    pub fn dim(&self) -> usize {
        4usize.pow(self.n_atoms as u32)
    }

    /// Interaction Hamiltonian on the qubit manifold.
    pub fn interaction(&self) -> &ComplexMatrix {
        &self.interaction
    }

    /// `ω̃ − ω`.
    pub fn transition_frequency(&self) -> f64 {
        self.omega_e - self.omega_g
    }

    /// Largest Rabi frequency among the lasers (zero without lasers).
    pub fn max_rabi(&self) -> f64 {
        self.lasers.iter().map(|l| l.rabi).fold(0.0, f64::max)
    }
}

/// Diagonal free Hamiltonian: `ω` per ground atom, `ω̃` per excited atom.
pub fn build_free_hamiltonian(spec: &SystemSpec) -> ComplexMatrix {
    let n = spec.n_atoms();
    let d = spec.dim();
    let mut h = zeros(d, d);
    for idx in 0..d {
        let energy: f64 = configuration_of(idx, n)
            .iter()
            .map(|l| if l.is_excited() { spec.omega_e } else { spec.omega_g })
            .sum();
        h[(idx, idx)] = real(energy);
    }
    h
}

/// The interaction lifted to the `4^N` space.
///
/// It equals the qubit interaction on the ground manifold and vanishes on
/// every configuration with an excited atom. An excited-sector interaction
/// would be added to this matrix; [`choose_detunings`] and
/// [`cooling_condition_margin_with`] already accept such a full-space matrix.
pub fn embed_interaction(spec: &SystemSpec) -> Result<ComplexMatrix> {
    let dev = hermiticity_error(spec.interaction());
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let e = ground_embedding(spec.n_atoms());
    Ok(&e * spec.interaction() * e.adjoint())
}

/// `Σ_i Σ_j |e_j>_i <g_j|` on the full space.
pub fn excitation_operator(n_atoms: usize) -> ComplexMatrix {
    let up = transition(Level::E0, Level::G0) + transition(Level::E1, Level::G1);
    (0..n_atoms)
        .map(|i| single_atom_operator(&up, i, n_atoms))
        .fold(zeros(4usize.pow(n_atoms as u32), 4usize.pow(n_atoms as u32)), |acc, m| acc + m)
}

/// `Σ_i P_e^(i)`: number of excited atoms.
pub fn excited_number_operator(n_atoms: usize) -> ComplexMatrix {
    let pe = transition(Level::E0, Level::E0) + transition(Level::E1, Level::E1);
    (0..n_atoms)
        .map(|i| single_atom_operator(&pe, i, n_atoms))
        .fold(zeros(4usize.pow(n_atoms as u32), 4usize.pow(n_atoms as u32)), |acc, m| acc + m)
}

/// Eigenbasis of the interaction extended by the laser-coupled excited
/// partner states.
///
/// Index `n < 2^N` is the `n`-th qubit eigenstate (ascending energy);
/// `2^N + n` is its partner `(1/√N) Σ_i Σ_j |e_j>_i<g_j| |λ_n>`, which holds
/// exactly one excited atom.
#[derive(Debug, Clone)]
pub struct LambdaBasis {
    n_atoms: usize,
    qubit_eigenvalues: Vec<f64>,
    qubit_states: ComplexMatrix,
    states: ComplexMatrix,
}

impl LambdaBasis {
    /// Build from a chosen orthonormal eigenbasis of the qubit interaction
    /// (columns of `qubit_states`, matching `eigenvalues`). Degeneracies are
    /// allowed here; the caller picked the target explicitly.
    pub fn from_qubit_eigenbasis(n_atoms: usize, eigenvalues: Vec<f64>, qubit_states: ComplexMatrix) -> Result<Self> {
        let qd = 1usize << n_atoms;
        if qubit_states.shape() != (qd, qd) || eigenvalues.len() != qd {
            return Err(Error::DimensionMismatch {
                context: "lambda basis",
                expected: qd,
                found: qubit_states.ncols(),
            });
        }
        let embed = ground_embedding(n_atoms);
        let ground = &embed * &qubit_states;
        let partners = excitation_operator(n_atoms) * &ground / real((n_atoms as f64).sqrt());

        let full = 4usize.pow(n_atoms as u32);
        let mut states = zeros(full, 2 * qd);
        states.columns_mut(0, qd).copy_from(&ground);
        states.columns_mut(qd, qd).copy_from(&partners);

        let gram = states.adjoint() * &states - identity(2 * qd);
        let dev = crate::linalg::max_abs(&gram);
        if dev > 1e-10 {
            return Err(Error::InvalidSpec(format!(
                "lambda basis is not orthonormal (max |G - I| = {dev:.3e})"
            )));
        }
        Ok(Self {
            n_atoms,
            qubit_eigenvalues: eigenvalues,
            qubit_states,
            states,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn qubit_dim(&self) -> usize {
        1 << self.n_atoms
    }

    /// `λ_0 … λ_{2^N−1}`, ascending.
    pub fn qubit_eigenvalues(&self) -> &[f64] {
        &self.qubit_eigenvalues
    }

    /// Eigenvectors of the interaction on the qubit space, as columns.
    pub fn qubit_states(&self) -> &ComplexMatrix {
        &self.qubit_states
    }

    /// All `2^{N+1}` states embedded in the full space, as columns.
    pub fn states(&self) -> &ComplexMatrix {
        &self.states
    }

    pub fn state(&self, m: usize) -> ComplexVector {
        self.states.column(m).into_owned()
    }

    /// Target state `|λ_0>` in the full space.
    pub fn ground(&self) -> ComplexVector {
        self.state(0)
    }

    /// `B† A B`: the operator `a` in the λ-basis coordinates.
    pub fn view(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.states.adjoint() * a * &self.states
    }
}

/// Diagonalise the interaction and build the λ-basis.
pub fn build_lambda_basis(spec: &SystemSpec) -> Result<LambdaBasis> {
    let eig = hermitian_eigen(spec.interaction())?;
    if eig.eigenvalues.len() > 1 {
        let (l0, l1) = (eig.eigenvalues[0], eig.eigenvalues[1]);
        let scale = eig.eigenvalues.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if l1 - l0 < DEGENERACY_TOL * scale {
            return Err(Error::DegenerateGround { lambda0: l0, lambda1: l1 });
        }
    }
    LambdaBasis::from_qubit_eigenbasis(spec.n_atoms(), eig.eigenvalues, eig.eigenvectors)
}

/// Laser Hamiltonian at time `t` in the rotating wave approximation.
pub fn build_laser_hamiltonian(spec: &SystemSpec, t: f64) -> ComplexMatrix {
    let d = spec.dim();
    let mut coupling = C64::new(0.0, 0.0);
    for laser in &spec.lasers {
        let frequency = spec.transition_frequency() - laser.detuning;
        coupling += C64::from_polar(laser.rabi / 2.0, -frequency * t);
    }
    if coupling == C64::new(0.0, 0.0) {
        return zeros(d, d);
    }
    let up = excitation_operator(spec.n_atoms()) * coupling;
    &up + up.adjoint()
}

/// `H_Free + H_Int + H_Laser(t)` in the laboratory frame.
pub fn lab_frame_hamiltonian(spec: &SystemSpec, t: f64) -> Result<ComplexMatrix> {
    Ok(build_free_hamiltonian(spec) + embed_interaction(spec)? + build_laser_hamiltonian(spec, t))
}

/// Time-independent Hamiltonian in the frame rotating with the single laser
/// frequency: `Σ_i Σ_j (Ω/2)(|e_j>_i<g_j| + h.c.) + Δ Σ_i P_e^(i) + H_Int`.
///
/// Lasers sharing one detuning are merged (their Rabi frequencies add).
pub fn interaction_picture_hamiltonian(spec: &SystemSpec) -> Result<ComplexMatrix> {
    let mut detunings: Vec<f64> = Vec::new();
    for l in &spec.lasers {
        if !detunings.iter().any(|d| same_frequency(*d, l.detuning)) {
            detunings.push(l.detuning);
        }
    }
    if detunings.len() > 1 {
        return Err(Error::MultipleFrequencies { count: detunings.len() });
    }
    let detuning = detunings.first().copied().unwrap_or(0.0);
    let rabi: f64 = spec.lasers.iter().map(|l| l.rabi).sum();

    let up = excitation_operator(spec.n_atoms()) * real(rabi / 2.0);
    let drive = &up + up.adjoint();
    Ok(drive + excited_number_operator(spec.n_atoms()) * real(detuning) + embed_interaction(spec)?)
}

fn same_frequency(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Common coupling `χ(t) = Σ_k (√N Ω_k / 2) e^{−i(ω̃ − ω − Δ_k)t}` between a
/// qubit eigenstate and its excited partner.
pub fn drive_coefficient(spec: &SystemSpec, t: f64) -> C64 {
    let sqrt_n = (spec.n_atoms() as f64).sqrt();
    spec.lasers
        .iter()
        .map(|l| C64::from_polar(sqrt_n * l.rabi / 2.0, -(spec.transition_frequency() - l.detuning) * t))
        .sum()
}

/// Detunings `Δ_k`, `k = 1 … 2^N − 1`, that put every excited qubit
/// eigenstate `|λ_k>` in resonance with its partner `|λ_{2^N+k}>`:
/// `Δ_k = λ_k − <λ_{2^N+k}|H_Int|λ_{2^N+k}>`.
///
/// `interaction_full` is the interaction on the full `4^N` space (see
/// [`embed_interaction`]); its excited-sector part shifts the partners.
pub fn choose_detunings(basis: &LambdaBasis, interaction_full: &ComplexMatrix) -> Result<Vec<f64>> {
    let lam = basis.qubit_eigenvalues();
    if lam.len() > 1 {
        let scale = lam.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if lam[1] - lam[0] < DEGENERACY_TOL * scale {
            return Err(Error::DegenerateGround {
                lambda0: lam[0],
                lambda1: lam[1],
            });
        }
    }
    let qd = basis.qubit_dim();
    Ok((1..qd)
        .map(|k| lam[k] - partner_shift(basis, interaction_full, qd + k))
        .collect())
}

/// `<λ_m|H_Int|λ_m>`.
fn partner_shift(basis: &LambdaBasis, interaction_full: &ComplexMatrix, m: usize) -> f64 {
    let v = basis.state(m);
    (v.adjoint() * interaction_full * &v)[(0, 0)].re
}

/// Distinct values among `detunings` (order of first appearance).
pub fn distinct_detunings(detunings: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &d in detunings {
        if !out.iter().any(|o| same_frequency(*o, d)) {
            out.push(d);
        }
    }
    out
}

/// `min_k |E_{2^N} − E_0 − (E_{2^N+k} − E_k)| / max(√N Ω, Γ)` for the
/// interaction of `spec`, where `Γ` is the largest channel decay rate.
/// Values well above one mean `|λ_0>` is far from resonance compared with the
/// drive and the linewidth.
pub fn cooling_condition_margin(basis: &LambdaBasis, spec: &SystemSpec) -> f64 {
    let full = embed_interaction(spec).expect("SystemSpec guarantees a Hermitian interaction");
    cooling_condition_margin_with(basis, &full, spec.max_rabi(), spec.decay.channel_max())
}

/// [`cooling_condition_margin`] with an explicit full-space interaction, Rabi
/// frequency and decay rate.
pub fn cooling_condition_margin_with(basis: &LambdaBasis, interaction_full: &ComplexMatrix, rabi: f64, gamma: f64) -> f64 {
    let qd = basis.qubit_dim();
    let lam = basis.qubit_eigenvalues();
    let shift0 = partner_shift(basis, interaction_full, qd);
    let min_offset = (1..qd)
        .map(|k| (shift0 - partner_shift(basis, interaction_full, qd + k) + lam[k] - lam[0]).abs())
        .fold(f64::INFINITY, f64::min);
    let scale = ((basis.n_atoms() as f64).sqrt() * rabi).max(gamma);
    min_offset / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs, pauli, ZERO};

    fn heisenberg(j: f64) -> ComplexMatrix {
        (kron(&pauli::x(), &pauli::x()) + kron(&pauli::y(), &pauli::y()) + kron(&pauli::z(), &pauli::z()))
            * real(j)
    }

    fn diag2(a: f64, b: f64) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[real(a), ZERO, ZERO, real(b)])
    }

    fn one_atom(interaction: ComplexMatrix, lasers: Vec<LaserSpec>) -> SystemSpec {
        SystemSpec::new(1, 0.0, 10.0, interaction, DecaySpec::uniform(1.0), lasers).unwrap()
    }

    #[test]
    fn basis_index_examples() {
        assert_eq!(atom_basis_index(&["g0"]).unwrap(), 0);
        assert_eq!(atom_basis_index(&["e1"]).unwrap(), 3);
        assert_eq!(atom_basis_index(&["g1", "e0"]).unwrap(), 6);
        assert!(matches!(atom_basis_index(&["x2"]), Err(Error::BadLabel(_))));
        for idx in 0..64 {
            assert_eq!(configuration_index(&configuration_of(idx, 3)), idx);
        }
    }

    #[test]
    fn free_hamiltonian_examples() {
        let spec = one_atom(diag2(0.0, 0.0), vec![]);
        let h = build_free_hamiltonian(&spec);
        let expect = [0.0, 0.0, 10.0, 10.0];
        for k in 0..4 {
            assert_eq!(h[(k, k)], real(expect[k]));
        }

        let spec2 = SystemSpec::new(2, 0.0, 10.0, identity(4) * ZERO, DecaySpec::uniform(1.0), vec![]).unwrap();
        let idx = configuration_index(&[Level::E0, Level::G1]);
        assert_eq!(build_free_hamiltonian(&spec2)[(idx, idx)], real(10.0));

        let spec3 = SystemSpec::new(2, 1.0, 10.0, identity(4) * ZERO, DecaySpec::uniform(1.0), vec![]).unwrap();
        let idx = configuration_index(&[Level::E0, Level::E1]);
        assert_eq!(build_free_hamiltonian(&spec3)[(idx, idx)], real(20.0));
    }

    #[test]
    fn embedding_examples() {
        let spec = one_atom(diag2(-2.0, 3.0), vec![]);
        let h = embed_interaction(&spec).unwrap();
        let mut want = zeros(4, 4);
        want[(0, 0)] = real(-2.0);
        want[(1, 1)] = real(3.0);
        assert_eq!(h, want);

        let spec = SystemSpec::new(2, 0.0, 10.0, heisenberg(1.0), DecaySpec::uniform(1.0), vec![]).unwrap();
        let h = embed_interaction(&spec).unwrap();
        let e = ground_embedding(2);
        let block = e.adjoint() * &h * &e;
        let eig = hermitian_eigen(&block).unwrap();
        for (got, want) in eig.eigenvalues.iter().zip([-3.0, 1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        for idx in 0..16 {
            if configuration_of(idx, 2).iter().any(|l| l.is_excited()) {
                for k in 0..16 {
                    assert_eq!(h[(idx, k)], ZERO);
                    assert_eq!(h[(k, idx)], ZERO);
                }
            }
        }

        let spec = one_atom(zeros(2, 2), vec![]);
        assert_eq!(embed_interaction(&spec).unwrap(), zeros(4, 4));
    }

    #[test]
    fn spec_validation() {
        let mut bad = diag2(0.0, 1.0);
        bad[(0, 1)] = ONE;
        assert!(matches!(
            SystemSpec::new(1, 0.0, 1.0, bad, DecaySpec::uniform(1.0), vec![]),
            Err(Error::NotHermitian { .. })
        ));
        assert!(SystemSpec::new(1, 1.0, 1.0, diag2(0.0, 1.0), DecaySpec::uniform(1.0), vec![]).is_err());
        assert!(LaserSpec::new(-1.0, 0.0).is_err());
        assert!(LaserSpec::new(f64::NAN, 0.0).is_err());
        assert!(DecaySpec::new([[1.0, -0.1], [0.0, 0.0]]).is_err());
        let d = DecaySpec::symmetric(2.0);
        assert_eq!(d.rate(0, 1), 1.0);
        assert_eq!(d.total(1), 2.0);
    }

    #[test]
    fn one_atom_partners_mirror_ground_states() {
        // Rotated qubit eigenbasis: |λ0> = a|g0> + b|g1>.
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let u = ComplexMatrix::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()]);
        let h = &u * diag2(-1.0, 1.0) * u.adjoint();
        let spec = one_atom(h, vec![]);
        let basis = build_lambda_basis(&spec).unwrap();
        let l0 = basis.state(0);
        let l2 = basis.state(2);
        let p0 = (l0[0] * l0[0].conj()).re + (l0[1] * l0[1].conj()).re;
        assert!((p0 - 1.0).abs() < 1e-12);
        assert!((l2[2] - l0[0]).norm() < 1e-12);
        assert!((l2[3] - l0[1]).norm() < 1e-12);
        let gram = basis.states().adjoint() * basis.states() - identity(4);
        assert!(max_abs(&gram) < 1e-10);
    }

    #[test]
    fn heisenberg_partners() {
        let spec = SystemSpec::new(2, 0.0, 10.0, heisenberg(1.0), DecaySpec::uniform(1.0), vec![]).unwrap();
        let basis = build_lambda_basis(&spec).unwrap();
        assert!((basis.qubit_eigenvalues()[0] + 3.0).abs() < 1e-12);
        let s = 1.0 / 2f64.sqrt();
        let singlet = ground_embedding(2) * ComplexVector::from_vec(vec![ZERO, real(s), real(-s), ZERO]);
        assert!((basis.ground() - &singlet).norm() < 1e-12);
        let partner = excitation_operator(2) * &singlet * real(s);
        assert!((basis.state(4) - &partner).norm() < 1e-12);
        assert!((partner.norm() - 1.0).abs() < 1e-12);
        let gram = basis.states().adjoint() * basis.states() - identity(8);
        assert!(max_abs(&gram) < 1e-10);
    }

    #[test]
    fn degenerate_ground_is_reported() {
        let spec = SystemSpec::new(2, 0.0, 10.0, heisenberg(-1.0), DecaySpec::uniform(1.0), vec![]).unwrap();
        assert!(matches!(build_lambda_basis(&spec), Err(Error::DegenerateGround { .. })));
    }

    #[test]
    fn laser_hamiltonian_examples() {
        let spec = one_atom(diag2(0.0, 1.0), vec![LaserSpec::new(0.8, 10.0).unwrap()]);
        // Δ = ω̃ − ω: the laser phase never advances.
        let h0 = build_laser_hamiltonian(&spec, 0.0);
        let h1 = build_laser_hamiltonian(&spec, 3.7);
        assert!(max_abs(&(&h0 - &h1)) < 1e-14);
        assert_eq!(h0[(2, 0)], real(0.4));
        assert_eq!(h0[(3, 1)], real(0.4));
        assert_eq!(h0[(0, 2)], real(0.4));
        assert_eq!(h0[(2, 1)], ZERO);

        let dark = one_atom(diag2(0.0, 1.0), vec![LaserSpec::new(0.0, 3.0).unwrap()]);
        assert_eq!(build_laser_hamiltonian(&dark, 1.3), zeros(4, 4));

        let detuned = one_atom(diag2(0.0, 1.0), vec![LaserSpec::new(1.0, 2.0).unwrap()]);
        for t in [0.0, 0.3, 1.9] {
            assert!(hermiticity_error(&build_laser_hamiltonian(&detuned, t)) < 1e-14);
        }
    }

    #[test]
    fn drive_coefficient_examples() {
        let spec = one_atom(diag2(0.0, 1.0), vec![LaserSpec::new(0.6, 4.0).unwrap()]);
        assert!((drive_coefficient(&spec, 0.0) - real(0.3)).norm() < 1e-15);

        // Frequencies ±w relative to the transition: phases ±π/2 at t = π/(2w).
        let w = 2.0;
        let spec = one_atom(
            diag2(0.0, 1.0),
            vec![LaserSpec::new(1.0, 10.0 - w).unwrap(), LaserSpec::new(1.0, 10.0 + w).unwrap()],
        );
        let t = std::f64::consts::FRAC_PI_2 / w;
        assert!(drive_coefficient(&spec, t).norm() < 1e-14);

        let spec2 =
            SystemSpec::new(2, 0.0, 10.0, heisenberg(5.0), DecaySpec::uniform(1.0), vec![LaserSpec::new(0.2, 5.0).unwrap()])
                .unwrap();
        for t in [0.0, 0.7, 13.1] {
            assert!((drive_coefficient(&spec2, t).norm() - 0.1 * 2f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn interaction_picture_in_lambda_basis() {
        let (l0, l1, omega) = (-3.0, 2.0, 0.7);
        let spec = one_atom(diag2(l0, l1), vec![LaserSpec::new(omega, l1).unwrap()]);
        let h = interaction_picture_hamiltonian(&spec).unwrap();
        let basis = build_lambda_basis(&spec).unwrap();
        let view = basis.view(&h) - identity(4) * real(l1);
        let mut want = zeros(4, 4);
        want[(0, 0)] = real(l0 - l1);
        want[(0, 2)] = real(omega / 2.0);
        want[(2, 0)] = real(omega / 2.0);
        want[(1, 3)] = real(omega / 2.0);
        want[(3, 1)] = real(omega / 2.0);
        assert!(max_abs(&(view - want)) < 1e-10);

        let undriven = one_atom(diag2(l0, l1), vec![LaserSpec::new(0.0, l1).unwrap()]);
        let view = basis.view(&interaction_picture_hamiltonian(&undriven).unwrap());
        assert!(((view[(0, 0)] - view[(1, 1)]).re - (l0 - l1)).abs() < 1e-12);
        assert!(max_abs(&(&view - ComplexMatrix::from_diagonal(&view.diagonal()))) < 1e-14);
    }

    #[test]
    fn heisenberg_interaction_picture_coupling() {
        let (j, omega) = (5.0, 0.2);
        let spec = SystemSpec::new(2, 0.0, 10.0, heisenberg(j), DecaySpec::uniform(1.0), vec![LaserSpec::new(omega, j).unwrap()])
            .unwrap();
        let h = interaction_picture_hamiltonian(&spec).unwrap();
        assert!(hermiticity_error(&h) < 1e-12);
        let basis = build_lambda_basis(&spec).unwrap();
        let view = basis.view(&h);
        for n in 0..4 {
            assert!((view[(n, n + 4)] - real(2f64.sqrt() * omega / 2.0)).norm() < 1e-10);
        }
        for n in 1..4 {
            assert!((view[(n, n)] - view[(n + 4, n + 4)]).norm() < 1e-10, "λ{n} must be resonant");
        }
        assert!(((view[(0, 0)] - view[(4, 4)]).re + 4.0 * j).abs() < 1e-10);
    }

    #[test]
    fn two_frequencies_are_rejected() {
        let spec = one_atom(
            diag2(0.0, 1.0),
            vec![LaserSpec::new(1.0, 0.0).unwrap(), LaserSpec::new(1.0, 1.0).unwrap()],
        );
        assert!(matches!(
            interaction_picture_hamiltonian(&spec),
            Err(Error::MultipleFrequencies { count: 2 })
        ));
    }

    #[test]
    fn undriven_hamiltonian_commutes_with_ground_projector() {
        let spec = SystemSpec::new(2, 0.0, 10.0, heisenberg(2.0), DecaySpec::uniform(1.0), vec![LaserSpec::new(0.0, 2.0).unwrap()])
            .unwrap();
        let h = interaction_picture_hamiltonian(&spec).unwrap();
        let e = ground_embedding(2);
        let p = &e * e.adjoint();
        assert!(max_abs(&crate::linalg::commutator(&h, &p)) < 1e-14);
    }

    #[test]
    fn detuning_choice() {
        let spec = one_atom(diag2(-4.0, 1.5), vec![]);
        let basis = build_lambda_basis(&spec).unwrap();
        let full = embed_interaction(&spec).unwrap();
        let d = choose_detunings(&basis, &full).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[0] - 1.5).abs() < 1e-12);

        // Shift the excited sector: resonance moves with it.
        let mut shifted = full.clone();
        shifted[(2, 2)] = real(0.5);
        shifted[(3, 3)] = real(0.5);
        let d = choose_detunings(&basis, &shifted).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12);

        let spec = SystemSpec::new(2, 0.0, 10.0, heisenberg(5.0), DecaySpec::uniform(1.0), vec![]).unwrap();
        let basis = build_lambda_basis(&spec).unwrap();
        let d = choose_detunings(&basis, &embed_interaction(&spec).unwrap()).unwrap();
        assert_eq!(d.len(), 3);
        let distinct = distinct_detunings(&d);
        assert_eq!(distinct.len(), 1);
        assert!((distinct[0] - 5.0).abs() < 1e-10);

        // Resonance checked operationally with the chosen detuning.
        let driven = SystemSpec::new(2, 0.0, 10.0, heisenberg(5.0), DecaySpec::uniform(1.0), vec![LaserSpec::new(0.3, distinct[0]).unwrap()])
            .unwrap();
        let view = basis.view(&interaction_picture_hamiltonian(&driven).unwrap());
        for k in 1..4 {
            assert!((view[(k, k)] - view[(k + 4, k + 4)]).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_interaction_gives_zero_detunings() {
        // Degenerate zero interaction is rejected as a cooling target; use a basis directly.
        let basis = LambdaBasis::from_qubit_eigenbasis(2, vec![0.0; 4], identity(4)).unwrap();
        let zero = zeros(16, 16);
        let lam = basis.qubit_dim();
        let d: Vec<f64> = (1..lam).map(|k| basis.qubit_eigenvalues()[k] - partner_shift(&basis, &zero, lam + k)).collect();
        assert!(d.iter().all(|x| *x == 0.0));
        assert!(matches!(choose_detunings(&basis, &zero), Err(Error::DegenerateGround { .. })));
    }

    #[test]
    fn margin_examples() {
        let spec = one_atom(diag2(-10.0, 0.0), vec![LaserSpec::new(1.0, 0.0).unwrap()]);
        let basis = build_lambda_basis(&spec).unwrap();
        assert!((cooling_condition_margin(&basis, &spec) - 10.0).abs() < 1e-12);

        let spec = SystemSpec::new(2, 0.0, 10.0, heisenberg(5.0), DecaySpec::uniform(1.0), vec![LaserSpec::new(0.2, 5.0).unwrap()])
            .unwrap();
        let basis = build_lambda_basis(&spec).unwrap();
        assert!((cooling_condition_margin(&basis, &spec) - 20.0).abs() < 1e-10);

        let spec = one_atom(diag2(-4.0, 0.0), vec![LaserSpec::new(0.0, 0.0).unwrap()]);
        let basis = build_lambda_basis(&spec).unwrap();
        assert!((cooling_condition_margin(&basis, &spec) - 4.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn interaction(d: usize) -> impl Strategy<Value = ComplexMatrix> {
            proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), d * d).prop_map(move |v| {
                let a = ComplexMatrix::from_iterator(d, d, v.into_iter().map(|(re, im)| C64::new(re, im)));
                (&a + a.adjoint()).scale(0.5)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn hamiltonians_are_hermitian(h in interaction(4), rabi in 0.0..2.0f64, det in -3.0..3.0f64, t in 0.0..50.0f64) {
                let spec = SystemSpec::new(2, 0.5, 9.0, h, DecaySpec::uniform(1.0), vec![LaserSpec::new(rabi, det).unwrap()]).unwrap();
                prop_assert!(hermiticity_error(&lab_frame_hamiltonian(&spec, t).unwrap()) <= 1e-10);
                prop_assert!(hermiticity_error(&interaction_picture_hamiltonian(&spec).unwrap()) <= 1e-10);
            }

            #[test]
            fn lambda_view_has_ladder_form(h in interaction(4), rabi in 0.01..2.0f64) {
                let probe = SystemSpec::new(2, 0.0, 9.0, h.clone(), DecaySpec::uniform(1.0), vec![]).unwrap();
                let basis = match build_lambda_basis(&probe) {
                    Ok(b) => b,
                    Err(Error::DegenerateGround { .. }) => return Ok(()),
                    Err(e) => return Err(TestCaseError::fail(e.to_string())),
                };
                let det = 0.7;
                let spec = SystemSpec::new(2, 0.0, 9.0, h, DecaySpec::uniform(1.0), vec![LaserSpec::new(rabi, det).unwrap()]).unwrap();
                let view = basis.view(&interaction_picture_hamiltonian(&spec).unwrap());
                let coupling = 2f64.sqrt() * rabi / 2.0;
                let lam = basis.qubit_eigenvalues();
                for m in 0..8 {
                    for n in 0..8 {
                        let expected = if m == n && m < 4 {
                            real(lam[m])
                        } else if m == n {
                            real(det)
                        } else if m + 4 == n || n + 4 == m {
                            real(coupling)
                        } else {
                            ZERO
                        };
                        prop_assert!((view[(m, n)] - expected).norm() <= 1e-10, "({}, {})", m, n);
                    }
                }
            }
        }
    }
}
