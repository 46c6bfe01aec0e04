//! Ready-made physical set-ups and parameter sweeps.
//!
//! Everything is in units of the per-channel decay rate `Γ`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis::{self, cooling_rate_fit, fidelity, fidelity_formula, steady_state, FIDELITY};
use crate::dynamics::{
    assemble_liouvillian, default_dt, integrate_liouvillian, reset_operators, IntegratorOptions, Liouvillian,
    ResetOperatorSet, Trajectory,
};
use crate::error::{Error, Result};
use crate::linalg::{basis_vector, c, hermitian_eigen, kron, pauli, real, zeros, ComplexMatrix, ComplexVector};
use crate::state::DensityMatrix;
use crate::system::{
    build_lambda_basis, choose_detunings, distinct_detunings, embed_interaction, ground_embedding,
    interaction_picture_hamiltonian, DecaySpec, LambdaBasis, LaserSpec, SystemSpec,
};

/// Excited-state energy `ω̃` used by the ready-made scenarios. Only the
/// laboratory-frame Hamiltonian depends on it.
pub const TRANSITION_FREQUENCY: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    OneQubit,
    TwoQubitHeisenberg,
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one_qubit" | "one-qubit" => Ok(Self::OneQubit),
            "two_qubit_heisenberg" | "two-qubit-heisenberg" | "two_qubit" | "heisenberg" => Ok(Self::TwoQubitHeisenberg),
            _ => Err(Error::BadConfig(format!(
                "unknown scenario kind {s:?} (expected one_qubit or two_qubit_heisenberg)"
            ))),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::OneQubit => "one_qubit",
            Self::TwoQubitHeisenberg => "two_qubit_heisenberg",
        })
    }
}

/// Initial state, always a state of the qubit (ground) manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// Interaction eigenstate `|λ_n>`.
    Lambda(usize),
    /// `1/2^N` on the qubit manifold.
    Mixed,
    /// Computational basis state `|q>` of the qubits, first qubit most significant.
    Basis(usize),
    /// `(|01> − |10>)/√2`.
    Singlet,
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let index = |rest: &str| {
            rest.trim_start_matches([':', '='])
                .parse::<usize>()
                .map_err(|_| Error::BadConfig(format!("bad initial state {s:?}")))
        };
        if s == "mixed" {
            Ok(Self::Mixed)
        } else if s == "singlet" {
            Ok(Self::Singlet)
        } else if s == "ground_lambda1" {
            Ok(Self::Lambda(1))
        } else if let Some(rest) = s.strip_prefix("lambda") {
            index(rest).map(Self::Lambda)
        } else if let Some(rest) = s.strip_prefix("basis") {
            index(rest).map(Self::Basis)
        } else {
            Err(Error::BadConfig(format!(
                "bad initial state {s:?} (expected mixed, singlet, lambda<n> or basis<n>)"
            )))
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lambda(n) => write!(f, "lambda{n}"),
            Self::Mixed => f.write_str("mixed"),
            Self::Basis(n) => write!(f, "basis{n}"),
            Self::Singlet => f.write_str("singlet"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub omega: f64,
    pub gamma: f64,
    /// `λ_1 − λ_0` for the one-qubit scheme.
    pub delta_lambda: f64,
    /// Heisenberg coupling for the two-qubit scheme.
    pub coupling_j: f64,
    /// Restrict the two-qubit scheme to the eight λ-states.
    pub truncate: bool,
    pub t_max: f64,
    /// `None` picks [`default_dt`].
    pub dt: Option<f64>,
    /// Spacing of stored samples; `None` stores every step.
    pub sample_interval: Option<f64>,
    pub initial_state: InitialState,
}

impl ScenarioConfig {
    pub fn one_qubit(omega: f64, delta_lambda: f64) -> Self {
        Self {
            kind: ScenarioKind::OneQubit,
            omega,
            gamma: 1.0,
            delta_lambda,
            coupling_j: 0.0,
            truncate: false,
            t_max: 200.0,
            dt: None,
            sample_interval: Some(0.1),
            initial_state: InitialState::Lambda(1),
        }
    }

    pub fn two_qubit(omega: f64, coupling_j: f64, truncate: bool) -> Self {
        Self {
            kind: ScenarioKind::TwoQubitHeisenberg,
            omega,
            gamma: 1.0,
            delta_lambda: 0.0,
            coupling_j,
            truncate,
            t_max: 1000.0,
            dt: None,
            sample_interval: Some(1.0),
            initial_state: InitialState::Mixed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::BadConfig(format!("{name} must be finite, got {v}")))
            }
        };
        finite("omega", self.omega)?;
        finite("gamma", self.gamma)?;
        finite("delta_lambda", self.delta_lambda)?;
        finite("coupling_j", self.coupling_j)?;
        finite("t_max", self.t_max)?;
        if self.omega < 0.0 {
            return Err(Error::BadConfig(format!("omega must be non-negative, got {}", self.omega)));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::BadConfig(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::BadConfig(format!("t_max must be positive, got {}", self.t_max)));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::BadConfig(format!("dt must be positive, got {dt}")));
            }
        }
        if let Some(s) = self.sample_interval {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::BadConfig(format!("sample interval must be positive, got {s}")));
            }
        }
        match self.kind {
            ScenarioKind::OneQubit if self.truncate => {
                Err(Error::BadConfig("truncation only applies to the two-qubit scenario".into()))
            }
            ScenarioKind::TwoQubitHeisenberg if self.coupling_j == 0.0 => {
                Err(Error::BadConfig("Heisenberg coupling J must be nonzero".into()))
            }
            _ => Ok(()),
        }
    }
}

/// `J (σx⊗σx + σy⊗σy + σz⊗σz)`.
pub fn heisenberg_interaction(j: f64) -> ComplexMatrix {
    let (x, y, z) = (pauli::x(), pauli::y(), pauli::z());
    (kron(&x, &x) + kron(&y, &y) + kron(&z, &z)) * real(j)
}

/// A scenario ready to simulate: generator pieces plus the target.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    /// `None` for the truncated model, which has no atomic product space.
    pub spec: Option<SystemSpec>,
    pub lambda: LambdaBasis,
    /// Laser detuning `Δ`.
    pub detuning: f64,
    /// Time-independent Hamiltonian in the simulation space.
    pub hamiltonian: ComplexMatrix,
    pub resets: ResetOperatorSet,
    /// `|λ_0>` in the simulation space.
    pub target: ComplexVector,
    /// Columns: the λ-states in the simulation space.
    pub lambda_states: ComplexMatrix,
    /// Isometry from the qubit space into the simulation space.
    qubit_map: ComplexMatrix,
}

impl Scenario {
    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn liouvillian(&self) -> Result<Liouvillian> {
        assemble_liouvillian(&self.hamiltonian, &self.resets)
    }

    pub fn steady_state(&self) -> Result<DensityMatrix> {
        Ok(steady_state(&self.liouvillian()?)?.rho_ss)
    }

    /// Fidelity of the stationary state with `|λ_0>`.
    pub fn steady_fidelity(&self) -> Result<f64> {
        fidelity(&self.steady_state()?, &self.target)
    }

    /// A state in the simulation space.
    pub fn initial_state(&self, init: InitialState) -> Result<DensityMatrix> {
        let qd = self.lambda.qubit_dim();
        let out_of_range = |n: usize| Error::BadConfig(format!("initial state index {n} is out of range 0..{qd}"));
        let qubit_rho = match init {
            InitialState::Mixed => DensityMatrix::maximally_mixed(qd).into_matrix(),
            InitialState::Lambda(n) => {
                if n >= qd {
                    return Err(out_of_range(n));
                }
                let v = self.lambda.qubit_states().column(n).into_owned();
                &v * v.adjoint()
            }
            InitialState::Basis(n) => {
                if n >= qd {
                    return Err(out_of_range(n));
                }
                let v = basis_vector(qd, n);
                &v * v.adjoint()
            }
            InitialState::Singlet => {
                if qd != 4 {
                    return Err(Error::BadConfig("the singlet needs two qubits".into()));
                }
                let v = singlet();
                &v * v.adjoint()
            }
        };
        DensityMatrix::new(&self.qubit_map * qubit_rho * self.qubit_map.adjoint())
    }

    /// Step size for this scenario: the configured one or [`default_dt`].
    pub fn dt(&self) -> f64 {
        self.config.dt.unwrap_or_else(|| default_dt(&self.hamiltonian, self.config.gamma))
    }

    /// Integrate from the configured initial state and record the fidelity.
    pub fn evolve(&self) -> Result<Trajectory> {
        let rho0 = self.initial_state(self.config.initial_state)?;
        let mut opts = IntegratorOptions::new(self.config.t_max, self.dt());
        if let Some(s) = self.config.sample_interval {
            opts = opts.sampled(s);
        }
        let mut traj = integrate_liouvillian(&self.liouvillian()?, &rho0, &opts)?;
        let target = self.target.clone();
        traj.record(FIDELITY, |rho| rho.expectation(&target).clamp(0.0, 1.0));
        Ok(traj)
    }

    /// `B† ρ B` with `B` the λ-states.
    pub fn to_lambda(&self, rho: &DensityMatrix) -> ComplexMatrix {
        rho.in_basis(&self.lambda_states)
    }
}

/// `(|01> − |10>)/√2` on two qubits.
pub fn singlet() -> ComplexVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexVector::from_vec(vec![real(0.0), real(s), real(-s), real(0.0)])
}

/// One qubit with `λ_0 = −Δ_λ`, `λ_1 = 0`, eigenvectors `|g0>`, `|g1>`.
pub fn build_one_qubit_scenario(cfg: &ScenarioConfig) -> Result<Scenario> {
    build_one_qubit_scenario_in_frame(cfg, &ComplexMatrix::identity(2, 2))
}

/// As [`build_one_qubit_scenario`], with the qubit eigenvectors given by the
/// columns of the unitary `frame`.
pub fn build_one_qubit_scenario_in_frame(cfg: &ScenarioConfig, frame: &ComplexMatrix) -> Result<Scenario> {
    cfg.validate()?;
    if cfg.kind != ScenarioKind::OneQubit {
        return Err(Error::BadConfig(format!("expected a one_qubit config, got {}", cfg.kind)));
    }
    if frame.shape() != (2, 2) {
        return Err(Error::BadConfig("qubit frame must be 2x2".into()));
    }
    let eigenvalues = vec![-cfg.delta_lambda, 0.0];
    let lambda = LambdaBasis::from_qubit_eigenbasis(1, eigenvalues.clone(), frame.clone())
        .map_err(|e| Error::BadConfig(format!("qubit frame is not unitary: {e}")))?;
    let interaction = frame * ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(2, eigenvalues.iter().map(|&x| real(x)))) * frame.adjoint();
    let interaction = (&interaction + interaction.adjoint()) * real(0.5);

    // Resonance of |λ_1> with its partner; a degenerate pair is allowed here.
    let probe = SystemSpec::new(1, 0.0, TRANSITION_FREQUENCY, interaction.clone(), DecaySpec::uniform(cfg.gamma), vec![])?;
    let full = embed_interaction(&probe)?;
    let view = lambda.view(&full);
    let detuning = eigenvalues[1] - view[(3, 3)].re;

    finish_full(cfg, 1, interaction, lambda, detuning)
}

fn finish_full(cfg: &ScenarioConfig, n: usize, interaction: ComplexMatrix, lambda: LambdaBasis, detuning: f64) -> Result<Scenario> {
    let spec = SystemSpec::new(
        n,
        0.0,
        TRANSITION_FREQUENCY,
        interaction,
        DecaySpec::uniform(cfg.gamma),
        vec![LaserSpec::new(cfg.omega, detuning)?],
    )?;
    let hamiltonian = interaction_picture_hamiltonian(&spec)?;
    let resets = reset_operators(&spec);
    Ok(Scenario {
        config: cfg.clone(),
        target: lambda.ground(),
        lambda_states: lambda.states().clone(),
        qubit_map: ground_embedding(n),
        spec: Some(spec),
        lambda,
        detuning,
        hamiltonian,
        resets,
    })
}

/// Two atoms with Heisenberg coupling `J`, driven by one laser resonant with
/// the triplet. The truncated variant works in the eight λ-states.
pub fn build_two_qubit_scenario(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    if cfg.kind != ScenarioKind::TwoQubitHeisenberg {
        return Err(Error::BadConfig(format!("expected a two_qubit_heisenberg config, got {}", cfg.kind)));
    }
    let interaction = heisenberg_interaction(cfg.coupling_j);
    let probe = SystemSpec::new(2, 0.0, TRANSITION_FREQUENCY, interaction.clone(), DecaySpec::uniform(cfg.gamma), vec![])?;
    let lambda = build_lambda_basis(&probe).map_err(|e| match e {
        Error::DegenerateGround { .. } => Error::BadConfig(format!(
            "J = {} gives a degenerate ground space; the target must be unique ({e})",
            cfg.coupling_j
        )),
        other => other,
    })?;
    let detunings = distinct_detunings(&choose_detunings(&lambda, &embed_interaction(&probe)?)?);
    if detunings.len() != 1 {
        return Err(Error::MultipleFrequencies { count: detunings.len() });
    }
    let detuning = detunings[0];

    if !cfg.truncate {
        return finish_full(cfg, 2, interaction, lambda, detuning);
    }

    let full_resets = reset_operators(&SystemSpec::new(
        2,
        0.0,
        TRANSITION_FREQUENCY,
        interaction,
        DecaySpec::uniform(cfg.gamma),
        vec![],
    )?);
    let resets = full_resets.compress(lambda.states())?;
    let hamiltonian = truncated_hamiltonian(lambda.qubit_eigenvalues(), cfg.omega, detuning, 2);
    let mut qubit_map = zeros(8, 4);
    qubit_map.rows_mut(0, 4).copy_from(&lambda.qubit_states().adjoint());
    Ok(Scenario {
        config: cfg.clone(),
        spec: None,
        target: basis_vector(8, 0),
        lambda_states: ComplexMatrix::identity(8, 8),
        qubit_map,
        lambda,
        detuning,
        hamiltonian,
        resets,
    })
}

/// Interaction-picture Hamiltonian on the `2^{N+1}` λ-states, shifted by
/// `−Δ`: couplings `√N Ω/2` between `|λ_n>` and `|λ_{2^N+n}>`, diagonal
/// `λ_n − Δ` on the qubit states and zero on the partners.
pub fn truncated_hamiltonian(eigenvalues: &[f64], omega: f64, detuning: f64, n_atoms: usize) -> ComplexMatrix {
    let qd = eigenvalues.len();
    let mut h = zeros(2 * qd, 2 * qd);
    let coupling = real((n_atoms as f64).sqrt() * omega / 2.0);
    for (n, &lam) in eigenvalues.iter().enumerate() {
        h[(n, n)] = real(lam - detuning);
        h[(n, qd + n)] = coupling;
        h[(qd + n, n)] = coupling;
    }
    h
}

/// Build whichever scenario the config asks for.
pub fn build_scenario(cfg: &ScenarioConfig) -> Result<Scenario> {
    match cfg.kind {
        ScenarioKind::OneQubit => build_one_qubit_scenario(cfg),
        ScenarioKind::TwoQubitHeisenberg => build_two_qubit_scenario(cfg),
    }
}

/// Fidelity trajectory of a two-qubit configuration.
pub fn fidelity_vs_time(cfg: &ScenarioConfig) -> Result<Trajectory> {
    if cfg.kind != ScenarioKind::TwoQubitHeisenberg {
        return Err(Error::BadConfig("fidelity_vs_time needs a two_qubit_heisenberg config".into()));
    }
    build_two_qubit_scenario(cfg)?.evolve()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Axis,
    Formula,
    Simulation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub provenance: Provenance,
}

/// Grid of results, one row per grid point, axes first.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    fn new(columns: &[(&str, Provenance)]) -> Self {
        Self {
            columns: columns
                .iter()
                .map(|&(name, provenance)| Column {
                    name: name.to_string(),
                    provenance,
                })
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Keep only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Option<SweepTable> {
        let idx: Vec<usize> = names.iter().map(|n| self.column_index(n)).collect::<Option<_>>()?;
        Some(SweepTable {
            columns: idx.iter().map(|&k| self.columns[k].clone()).collect(),
            rows: self.rows.iter().map(|r| idx.iter().map(|&k| r[k]).collect()).collect(),
        })
    }

    /// Every combination of axis values appears exactly once.
    pub fn is_rectangular(&self) -> bool {
        let axes: Vec<usize> = (0..self.columns.len())
            .filter(|&k| self.columns[k].provenance == Provenance::Axis)
            .collect();
        let mut keys: Vec<Vec<u64>> = self.rows.iter().map(|r| axes.iter().map(|&k| r[k].to_bits()).collect()).collect();
        let expected: usize = axes
            .iter()
            .map(|&k| {
                let mut v: Vec<u64> = self.rows.iter().map(|r| r[k].to_bits()).collect();
                v.sort_unstable();
                v.dedup();
                v.len()
            })
            .product();
        keys.sort();
        let n = keys.len();
        keys.dedup();
        keys.len() == n && n == expected
    }
}

fn run_in_pool<T, F>(jobs: usize, f: F) -> T
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Formula and simulated stationary fidelity on the grid `omegas × deltas`
/// of the one-qubit scheme.
pub fn sweep_fidelity_vs_detuning(omegas: &[f64], deltas: &[f64], gamma: f64, jobs: usize) -> Result<SweepTable> {
    let points: Vec<(f64, f64)> = omegas.iter().flat_map(|&o| deltas.iter().map(move |&d| (o, d))).collect();
    let rows: Result<Vec<Vec<f64>>> = run_in_pool(jobs, || {
        points
            .par_iter()
            .map(|&(omega, delta)| {
                let mut cfg = ScenarioConfig::one_qubit(omega, delta);
                cfg.gamma = gamma;
                let numeric = build_one_qubit_scenario(&cfg)?.steady_fidelity()?;
                Ok(vec![omega, delta, fidelity_formula(omega, gamma, delta), numeric])
            })
            .collect()
    });
    let mut table = SweepTable::new(&[
        ("omega", Provenance::Axis),
        ("delta_lambda", Provenance::Axis),
        ("fidelity_formula", Provenance::Formula),
        ("fidelity_numeric", Provenance::Simulation),
    ]);
    table.rows = rows?;
    Ok(table)
}

/// Trajectory settings for one rate fit: long enough for the gap to shrink
/// well below the fit window, sampled finely enough to resolve it.
pub fn rate_fit_config(omega: f64, delta_lambda: f64, gamma: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::one_qubit(omega, delta_lambda);
    cfg.gamma = gamma;
    let rate = analysis::cooling_rate_formula(omega, gamma, delta_lambda);
    cfg.t_max = if rate > 0.0 { 20.0 / rate } else { 1.0 };
    cfg.sample_interval = Some(cfg.t_max / 2000.0);
    cfg.initial_state = InitialState::Lambda(1);
    cfg
}

/// Cooling rate from a simulated trajectory started in `|λ_1>`.
pub fn fitted_cooling_rate(cfg: &ScenarioConfig) -> Result<f64> {
    let scenario = build_one_qubit_scenario(cfg)?;
    let f_ss = scenario.steady_fidelity()?;
    cooling_rate_fit(&scenario.evolve()?, f_ss)
}

/// Closed-form and fitted cooling rates of the one-qubit scheme along `omegas`.
///
/// Columns: `omega`, `rate_formula` (large-detuning limit), `rate_formula_exact`
/// (finite `Δ_λ`) and `rate_fit`.
pub fn sweep_rate_vs_omega(omegas: &[f64], delta_lambda: f64, gamma: f64, jobs: usize) -> Result<SweepTable> {
    let rows: Result<Vec<Vec<f64>>> = run_in_pool(jobs, || {
        omegas
            .par_iter()
            .map(|&omega| {
                let fit = fitted_cooling_rate(&rate_fit_config(omega, delta_lambda, gamma))?;
                Ok(vec![
                    omega,
                    analysis::cooling_rate_large_detuning(omega, gamma),
                    analysis::cooling_rate_formula(omega, gamma, delta_lambda),
                    fit,
                ])
            })
            .collect()
    });
    let mut table = SweepTable::new(&[
        ("omega", Provenance::Axis),
        ("rate_formula", Provenance::Formula),
        ("rate_formula_exact", Provenance::Formula),
        ("rate_fit", Provenance::Simulation),
    ]);
    table.rows = rows?;
    Ok(table)
}

/// Random-ish 2×2 unitary from three angles.
pub fn qubit_rotation(theta: f64, phi: f64, chi: f64) -> ComplexMatrix {
    let (s, co) = theta.sin_cos();
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            c(co, 0.0) * c(0.0, phi).exp(),
            -c(s, 0.0) * c(0.0, chi).exp(),
            c(s, 0.0) * c(0.0, -chi).exp(),
            c(co, 0.0) * c(0.0, -phi).exp(),
        ],
    )
}

/// Eigenvalues of the Heisenberg coupling, ascending.
pub fn heisenberg_spectrum(j: f64) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(&heisenberg_interaction(j))?.eigenvalues)
}
