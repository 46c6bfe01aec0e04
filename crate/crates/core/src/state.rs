//! Validated density matrices.

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_error, hermitian_eigen, outer, real, trace, ComplexMatrix, ComplexVector};

/// Allowed entrywise deviation from Hermiticity.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-9;
/// Most negative eigenvalue still accepted as positive semidefinite.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// How far a matrix is from being a valid state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub hermiticity: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn of(m: &ComplexMatrix) -> Self {
        let hermiticity = hermiticity_error(m);
        let trace_error = (trace(m) - real(1.0)).norm();
        let sym = (m + m.adjoint()).scale(0.5);
        let min_eigenvalue = hermitian_eigen(&sym)
            .map(|e| e.eigenvalues[0])
            .unwrap_or(f64::NEG_INFINITY);
        Self {
            hermiticity,
            trace_error,
            min_eigenvalue,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.hermiticity > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max |ρ - ρ†| = {:.3e})",
                self.hermiticity
            )));
        }
        if self.trace_error > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace differs from 1 by {:.3e}",
                self.trace_error
            )));
        }
        if self.min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                self.min_eigenvalue
            )));
        }
        Ok(())
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate `matrix` against the state invariants.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        StateDiagnostics::of(&matrix).check()?;
        Ok(Self { matrix })
    }

    /// Skip validation. The caller guarantees the invariants.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `|ψ><ψ|` for a (normalised on the fly) state vector.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let psi = psi / real(norm);
        Ok(Self::new_unchecked(outer(&psi, &psi)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new_unchecked(ComplexMatrix::identity(dim, dim).scale(1.0 / dim as f64))
    }

    /// Uniform mixture of the orthonormal columns of `states`.
    pub fn uniform_mixture(states: &ComplexMatrix) -> Result<Self> {
        let k = states.ncols() as f64;
        Self::new((states * states.adjoint()).scale(1.0 / k))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        StateDiagnostics::of(&self.matrix)
    }

    /// `<ψ|ρ|ψ>`.
    pub fn expectation(&self, psi: &ComplexVector) -> f64 {
        (psi.adjoint() * &self.matrix * psi)[(0, 0)].re
    }

    /// Express the state in another basis, `B† ρ B`, where the columns of
    /// `basis` are orthonormal. Not validated: a partial basis gives a
    /// sub-normalised block.
    pub fn in_basis(&self, basis: &ComplexMatrix) -> ComplexMatrix {
        basis.adjoint() * &self.matrix * basis
    }
}
