use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |a - a†| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("bad atomic level label {0:?} (expected one of g0, g1, e0, e1)")]
    BadLabel(String),

    #[error("ground state of the interaction is degenerate (λ0 = {lambda0}, λ1 = {lambda1}); the cooling target is not unique")]
    DegenerateGround { lambda0: f64, lambda1: f64 },

    #[error("interaction-picture Hamiltonian needs a single laser frequency, found {count} distinct detunings")]
    MultipleFrequencies { count: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid system specification: {0}")]
    InvalidSpec(String),

    #[error("DegenerateSteadyState: second-smallest singular value {gap:.3e} is below {threshold:.1e}; the stationary state is not unique")]
    DegenerateSteadyState { gap: f64, threshold: f64 },

    #[error("StepTooLarge at t = {time}: {reason}; reduce dt (currently {dt})")]
    StepTooLarge { time: f64, dt: f64, reason: String },

    #[error("NotConverged: {0}")]
    NotConverged(String),

    #[error("NonMonotone: {0}")]
    NonMonotone(String),

    #[error("the analytic stationary state needs a nonzero Rabi frequency")]
    ZeroRabi,

    #[error("bad scenario configuration: {0}")]
    BadConfig(String),
}

impl Error {
    /// Numerical failures as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSteadyState { .. }
                | Error::StepTooLarge { .. }
                | Error::NotConverged(_)
                | Error::NonMonotone(_)
                | Error::DegenerateGround { .. }
        )
    }
}
