//! Master-equation dynamics: reset (jump) operators, the Lindblad dissipator,
//! the vectorised Liouvillian and a fixed-step RK4 integrator.
//!
//! Vectorisation stacks columns, `vec(ρ)[i + d·j] = ρ[i, j]`, so that
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use std::collections::BTreeMap;

use nalgebra_sparse::ops::serial::spmm_csr_dense;
use nalgebra_sparse::ops::Op;
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, hermiticity_error, identity, kron, real, trace, unvectorize, vectorize, ComplexMatrix,
    ComplexVector, C64, HERMITIAN_TOL, I, ONE, ZERO,
};
use crate::state::{DensityMatrix, StateDiagnostics, POSITIVITY_TOL, TRACE_TOL};
use crate::system::{single_atom_operator, transition, Level, SystemSpec};

/// Trace drift above which the state is renormalised after a step.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-12;

/// Which physical emission channel an operator describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResetChannel {
    /// 0-based atom index.
    pub atom: usize,
    /// Ground level `j` the atom lands in.
    pub to_ground: usize,
    /// Excited level `k` the atom leaves.
    pub from_excited: usize,
}

#[derive(Debug, Clone)]
pub struct ResetOperator {
    pub matrix: ComplexMatrix,
    pub rate: f64,
    pub channel: ResetChannel,
}

/// The `4N` reset operators `R_jk^(i) = |g_j>_i<e_k|` with rates `Γ_jk`.
#[derive(Debug, Clone)]
pub struct ResetOperatorSet {
    dim: usize,
    operators: Vec<ResetOperator>,
}

impl ResetOperatorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ResetOperator] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Compress every operator onto the span of the orthonormal columns of
    /// `isometry`: `R ↦ B† R B`.
    pub fn compress(&self, isometry: &ComplexMatrix) -> Result<ResetOperatorSet> {
        if isometry.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "reset operator compression",
                expected: self.dim,
                found: isometry.nrows(),
            });
        }
        let operators = self
            .operators
            .iter()
            .map(|op| ResetOperator {
                matrix: isometry.adjoint() * &op.matrix * isometry,
                rate: op.rate,
                channel: op.channel,
            })
            .collect();
        Ok(ResetOperatorSet {
            dim: isometry.ncols(),
            operators,
        })
    }

    /// `Σ Γ R†R`, the anticommutator part of the dissipator.
    fn decay_generator(&self) -> ComplexMatrix {
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, op| {
                acc + (op.matrix.adjoint() * &op.matrix).scale(op.rate)
            })
    }
}

pub fn reset_operators(spec: &SystemSpec) -> ResetOperatorSet {
    let n = spec.n_atoms();
    let mut operators = Vec::with_capacity(4 * n);
    for atom in 0..n {
        for j in 0..2 {
            for k in 0..2 {
                let local = transition(Level::ground(j), Level::excited(k));
                operators.push(ResetOperator {
                    matrix: single_atom_operator(&local, atom, n),
                    rate: spec.decay.rate(j, k),
                    channel: ResetChannel {
                        atom,
                        to_ground: j,
                        from_excited: k,
                    },
                });
            }
        }
    }
    ResetOperatorSet {
        dim: spec.dim(),
        operators,
    }
}

fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { context, expected, found })
    }
}

/// `Σ Γ [RρR† − ½R†Rρ − ½ρR†R]`.
pub fn dissipator(rho: &DensityMatrix, ops: &ResetOperatorSet) -> Result<ComplexMatrix> {
    check_dim("dissipator", ops.dim(), rho.dim())?;
    Ok(dissipator_matrix(rho.matrix(), ops, &ops.decay_generator()))
}

fn dissipator_matrix(rho: &ComplexMatrix, ops: &ResetOperatorSet, decay: &ComplexMatrix) -> ComplexMatrix {
    let mut out = (decay * rho + rho * decay).scale(-0.5);
    for op in ops.operators() {
        if op.rate != 0.0 {
            out += (&op.matrix * rho * op.matrix.adjoint()).scale(op.rate);
        }
    }
    out
}

/// `dρ/dt = −i[H, ρ] + D(ρ)`.
pub fn master_rhs(h: &ComplexMatrix, rho: &DensityMatrix, ops: &ResetOperatorSet) -> Result<ComplexMatrix> {
    check_dim("master_rhs (Hamiltonian)", rho.dim(), h.nrows())?;
    check_dim("master_rhs (reset operators)", rho.dim(), ops.dim())?;
    let dev = hermiticity_error(h);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(rhs_matrix(h, rho.matrix(), ops, &ops.decay_generator()))
}

fn rhs_matrix(h: &ComplexMatrix, rho: &ComplexMatrix, ops: &ResetOperatorSet, decay: &ComplexMatrix) -> ComplexMatrix {
    commutator(h, rho) * -I + dissipator_matrix(rho, ops, decay)
}

/// Superoperator `L` with `vec(dρ/dt) = L vec(ρ)` (column stacking).
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Liouvillian {
    /// Dimension `d` of the state space (the matrix is `d² × d²`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        unvectorize(&(&self.matrix * vectorize(rho)), self.dim)
    }

    /// `max |vec(I)† L|`, zero for a trace-preserving generator.
    pub fn trace_preservation_error(&self) -> f64 {
        let id = vectorize(&identity(self.dim));
        (id.adjoint() * &self.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn assemble_liouvillian(h: &ComplexMatrix, ops: &ResetOperatorSet) -> Result<Liouvillian> {
    let d = h.nrows();
    check_dim("assemble_liouvillian", d, ops.dim())?;
    let dev = hermiticity_error(h);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let id = identity(d);
    let mut l = (kron(&id, h) - kron(&h.transpose(), &id)) * -I;
    let decay = ops.decay_generator();
    l -= (kron(&id, &decay) + kron(&decay.transpose(), &id)).scale(0.5);
    for op in ops.operators() {
        if op.rate != 0.0 {
            l += kron(&op.matrix.conjugate(), &op.matrix).scale(op.rate);
        }
    }
    Ok(Liouvillian { dim: d, matrix: l })
}

/// Source of the (possibly time-dependent) Hamiltonian for [`integrate`].
pub trait HamiltonianProvider {
    fn hamiltonian(&self, t: f64) -> ComplexMatrix;

    /// `Some(H)` when the Hamiltonian does not depend on time.
    fn constant(&self) -> Option<&ComplexMatrix> {
        None
    }
}

impl HamiltonianProvider for ComplexMatrix {
    fn hamiltonian(&self, _t: f64) -> ComplexMatrix {
        self.clone()
    }

    fn constant(&self) -> Option<&ComplexMatrix> {
        Some(self)
    }
}

/// Wraps a closure `t ↦ H(t)`.
pub struct TimeDependent<F>(pub F);

impl<F: Fn(f64) -> ComplexMatrix> HamiltonianProvider for TimeDependent<F> {
    fn hamiltonian(&self, t: f64) -> ComplexMatrix {
        (self.0)(t)
    }
}

/// Laboratory-frame Hamiltonian `H_Free + H_Int + H_Laser(t)` of a spec, for
/// drives with several laser frequencies.
pub struct LabFrame {
    static_part: ComplexMatrix,
    spec: SystemSpec,
}

impl LabFrame {
    pub fn new(spec: &SystemSpec) -> Result<Self> {
        Ok(Self {
            static_part: crate::system::build_free_hamiltonian(spec) + crate::system::embed_interaction(spec)?,
            spec: spec.clone(),
        })
    }
}

impl HamiltonianProvider for LabFrame {
    fn hamiltonian(&self, t: f64) -> ComplexMatrix {
        &self.static_part + crate::system::build_laser_hamiltonian(&self.spec, t)
    }
}

/// Step size `min(0.01/Γ, 0.1/max|H_ij|)`.
pub fn default_dt(h: &ComplexMatrix, gamma: f64) -> f64 {
    let h_max = crate::linalg::max_abs(h);
    let by_gamma = if gamma > 0.0 { 0.01 / gamma } else { f64::INFINITY };
    let by_h = if h_max > 0.0 { 0.1 / h_max } else { f64::INFINITY };
    let dt = by_gamma.min(by_h);
    if dt.is_finite() {
        dt
    } else {
        0.01
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub t_max: f64,
    pub dt: f64,
    /// Store a state roughly every this much time; `None` stores every step.
    pub sample_interval: Option<f64>,
}

impl IntegratorOptions {
    pub fn new(t_max: f64, dt: f64) -> Self {
        Self {
            t_max,
            dt,
            sample_interval: None,
        }
    }

    pub fn sampled(mut self, interval: f64) -> Self {
        self.sample_interval = Some(interval);
        self
    }
}

/// Stored states of an integration run, plus any named observables.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    observables: BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("a trajectory always holds the initial state")
    }

    /// Evaluate `f` on every stored state and keep the series under `name`.
    pub fn record<F: Fn(&DensityMatrix) -> f64>(&mut self, name: &str, f: F) -> &[f64] {
        let series: Vec<f64> = self.states.iter().map(f).collect();
        self.observables.insert(name.to_string(), series);
        &self.observables[name]
    }

    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables.get(name).map(Vec::as_slice)
    }

    /// Build a trajectory from precomputed samples of a single observable
    /// (no states). Times must be strictly increasing.
    pub fn from_series(times: Vec<f64>, name: &str, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                context: "trajectory series",
                expected: times.len(),
                found: values.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidState("trajectory times must be strictly increasing".into()));
        }
        let mut observables = BTreeMap::new();
        observables.insert(name.to_string(), values);
        Ok(Self {
            times,
            states: Vec::new(),
            observables,
        })
    }
}

/// Integrate the master equation with classic fixed-step RK4.
///
/// After each step the state is symmetrised, `ρ ← (ρ + ρ†)/2`. A trace drift
/// above `1e-12` is renormalised, above `1e-9` it aborts with
/// [`Error::StepTooLarge`]. Stored states are checked for positivity
/// (smallest eigenvalue ≥ −1e-9) and a violation also aborts; states are
/// never projected back.
pub fn integrate(
    h: &dyn HamiltonianProvider,
    ops: &ResetOperatorSet,
    rho0: &DensityMatrix,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let d = rho0.dim();
    check_dim("integrate (reset operators)", d, ops.dim())?;
    check_dim("integrate (Hamiltonian)", d, h.hamiltonian(0.0).nrows())?;

    if let Some(h) = h.constant() {
        let l = assemble_liouvillian(h, ops)?;
        return integrate_liouvillian(&l, rho0, opts);
    }

    let decay = ops.decay_generator();
    let rhs = |t: f64, y: &ComplexVector| -> ComplexVector {
        let rho = unvectorize(y, d);
        vectorize(&rhs_matrix(&h.hamiltonian(t), &rho, ops, &decay))
    };
    run_rk4(rhs, rho0, opts)
}

/// RK4 on `dvec(ρ)/dt = L vec(ρ)` for a time-independent generator.
pub fn integrate_liouvillian(l: &Liouvillian, rho0: &DensityMatrix, opts: &IntegratorOptions) -> Result<Trajectory> {
    check_dim("integrate_liouvillian", l.dim(), rho0.dim())?;
    let csr = sparse(l.matrix());
    let rhs = |_t: f64, y: &ComplexVector| -> ComplexVector {
        let mut out = ComplexVector::zeros(y.len());
        spmm_csr_dense(ZERO, &mut out, ONE, Op::NoOp(&csr), Op::NoOp(y));
        out
    };
    run_rk4(rhs, rho0, opts)
}

fn sparse(m: &ComplexMatrix) -> CsrMatrix<C64> {
    let mut coo = CooMatrix::new(m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != ZERO {
                coo.push(i, j, v);
            }
        }
    }
    CsrMatrix::from(&coo)
}

fn run_rk4<F>(rhs: F, rho0: &DensityMatrix, opts: &IntegratorOptions) -> Result<Trajectory>
where
    F: Fn(f64, &ComplexVector) -> ComplexVector,
{
    if !(opts.dt > 0.0) || !opts.dt.is_finite() {
        return Err(Error::BadConfig(format!("dt must be positive, got {}", opts.dt)));
    }
    if !(opts.t_max >= 0.0) || !opts.t_max.is_finite() {
        return Err(Error::BadConfig(format!("t_max must be finite and non-negative, got {}", opts.t_max)));
    }
    rho0.diagnostics().check()?;

    let d = rho0.dim();
    let steps = (opts.t_max / opts.dt).ceil().max(0.0) as usize;
    let dt = if steps > 0 { opts.t_max / steps as f64 } else { opts.dt };
    let stride = match opts.sample_interval {
        Some(interval) if interval > 0.0 => ((interval / dt).round() as usize).max(1),
        _ => 1,
    };

    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut y = vectorize(rho0.matrix());
    let half = real(dt / 2.0);
    let full = real(dt);
    let sixth = real(dt / 6.0);

    for step in 1..=steps {
        let t = (step - 1) as f64 * dt;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + dt / 2.0, &(&y + &k1 * half));
        let k3 = rhs(t + dt / 2.0, &(&y + &k2 * half));
        let k4 = rhs(t + dt, &(&y + &k3 * full));
        y += (k1 + (k2 + k3) * real(2.0) + k4) * sixth;

        let time = step as f64 * dt;
        let mut rho = unvectorize(&y, d);
        rho = (&rho + rho.adjoint()).scale(0.5);
        let tr = trace(&rho);
        let drift = (tr - real(1.0)).norm();
        if !drift.is_finite() || drift > TRACE_TOL {
            return Err(Error::StepTooLarge {
                time,
                dt,
                reason: format!("trace drifted by {drift:.3e}"),
            });
        }
        if drift > RENORMALIZE_THRESHOLD {
            rho /= C64::new(tr.re, 0.0);
        }
        y = vectorize(&rho);

        if step % stride == 0 || step == steps {
            let diag = StateDiagnostics::of(&rho);
            if diag.min_eigenvalue < -POSITIVITY_TOL {
                return Err(Error::StepTooLarge {
                    time,
                    dt,
                    reason: format!("state lost positivity (smallest eigenvalue {:.3e})", diag.min_eigenvalue),
                });
            }
            times.push(time);
            states.push(DensityMatrix::new_unchecked(rho));
        }
    }

    Ok(Trajectory {
        times,
        states,
        observables: BTreeMap::new(),
    })
}
