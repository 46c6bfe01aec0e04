//! Stationary states, fidelities and cooling rates.
//!
//! The closed-form results describe one qubit driven by a single laser that is
//! resonant with `|λ_1>` while `|λ_0>` sits `Δ_λ` below it. `Γ` is the rate of
//! each of the four emission channels `|λ_{2,3}> → |λ_{0,1}>`, so each excited
//! state decays at `2Γ` (see [`crate::system::DecaySpec::uniform`]). All
//! matrices are in the basis `{|λ_0>, |λ_1>, |λ_2>, |λ_3>}`.

use crate::dynamics::{Liouvillian, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{c, max_abs, real, smallest_singular_pairs, trace, unvectorize, vectorize, ComplexMatrix, ComplexVector};
use crate::state::DensityMatrix;

/// Second-smallest singular value below which the stationary state is
/// reported as non-unique.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Name of the fidelity observable on trajectories.
pub const FIDELITY: &str = "fidelity";

#[derive(Debug, Clone)]
pub struct SteadyResult {
    pub rho_ss: DensityMatrix,
    /// `‖L vec(ρ_ss)‖`.
    pub residual: f64,
    /// Second-smallest singular value of `L`.
    pub gap_indicator: f64,
}

/// Null vector of the Liouvillian, reshaped into a unit-trace Hermitian state.
pub fn steady_state(liouv: &Liouvillian) -> Result<SteadyResult> {
    let d = liouv.dim();
    let pairs = smallest_singular_pairs(liouv.matrix(), 2);
    let gap_indicator = pairs.get(1).map_or(f64::INFINITY, |p| p.value);
    if gap_indicator < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateSteadyState {
            gap: gap_indicator,
            threshold: DEGENERACY_THRESHOLD,
        });
    }
    let raw = unvectorize(&pairs[0].vector, d);
    let tr = trace(&raw);
    if tr.norm() < 1e-12 {
        return Err(Error::InvalidState("null vector of the Liouvillian is traceless".into()));
    }
    let rho = raw / tr;
    let rho = (&rho + rho.adjoint()).scale(0.5);
    let residual = (liouv.matrix() * vectorize(&rho)).norm();
    Ok(SteadyResult {
        rho_ss: DensityMatrix::new(rho)?,
        residual,
        gap_indicator,
    })
}

fn denominator(omega: f64, gamma: f64, delta_lambda: f64) -> f64 {
    2.0 * gamma * gamma + delta_lambda * delta_lambda + omega * omega
}

/// Closed-form stationary state of the one-qubit scheme in the λ-basis.
///
/// With `D = 2Γ² + Δ_λ² + Ω²`:
///
/// ```text
/// ρ00 = (4Γ² + 4Δ_λ² + Ω²) / 4D      ρ11 = (4Γ² + Ω²) / 4D
/// ρ22 = ρ33 = Ω² / 4D
/// ρ02 = (−Δ_λ + iΓ) Ω / 2D           ρ13 = iΓΩ / 2D
/// ```
///
/// and every other off-diagonal element zero. `ρ02` and `ρ13` carry the same
/// imaginary part: at `Δ_λ = 0` the two driven transitions are identical.
pub fn analytic_steady_one_qubit(omega: f64, gamma: f64, delta_lambda: f64) -> Result<DensityMatrix> {
    if omega == 0.0 {
        return Err(Error::ZeroRabi);
    }
    let d = denominator(omega, gamma, delta_lambda);
    let (o2, g2, l2) = (omega * omega, gamma * gamma, delta_lambda * delta_lambda);
    let mut rho = ComplexMatrix::zeros(4, 4);
    rho[(0, 0)] = real((4.0 * g2 + 4.0 * l2 + o2) / (4.0 * d));
    rho[(1, 1)] = real((4.0 * g2 + o2) / (4.0 * d));
    rho[(2, 2)] = real(o2 / (4.0 * d));
    rho[(3, 3)] = real(o2 / (4.0 * d));
    rho[(0, 2)] = c(-delta_lambda * omega, gamma * omega) / (2.0 * d);
    rho[(2, 0)] = rho[(0, 2)].conj();
    rho[(1, 3)] = c(0.0, gamma * omega) / (2.0 * d);
    rho[(3, 1)] = rho[(1, 3)].conj();
    DensityMatrix::new(rho)
}

/// `<target|ρ|target>`.
pub fn fidelity(rho: &DensityMatrix, target: &ComplexVector) -> Result<f64> {
    if target.len() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "fidelity",
            expected: rho.dim(),
            found: target.len(),
        });
    }
    let norm = target.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("target state has norm {norm}, expected 1")));
    }
    Ok(rho.expectation(target).clamp(0.0, 1.0))
}

/// `F = 1 − (4Γ² + 3Ω²) / 4(Δ_λ² + 2Γ² + Ω²)`, identical to `ρ00` above.
pub fn fidelity_formula(omega: f64, gamma: f64, delta_lambda: f64) -> f64 {
    1.0 - (4.0 * gamma * gamma + 3.0 * omega * omega) / (4.0 * denominator(omega, gamma, delta_lambda))
}

/// Heating rate `γ_h = Γ ρ22 / 2` out of `|λ_0>`, from a λ-basis state.
pub fn heating_rate(rho_ss: &DensityMatrix, gamma: f64) -> f64 {
    0.5 * gamma * rho_ss.matrix()[(2, 2)].re
}

/// `γ_c = ΓΩ²(4Δ_λ² + 4Γ² + Ω²) / [8(Δ_λ² + 2Γ² + Ω²)(4Γ² + 3Ω²)]`.
pub fn cooling_rate_formula(omega: f64, gamma: f64, delta_lambda: f64) -> f64 {
    let (o2, g2, l2) = (omega * omega, gamma * gamma, delta_lambda * delta_lambda);
    if o2 == 0.0 {
        return 0.0;
    }
    gamma * o2 * (4.0 * l2 + 4.0 * g2 + o2) / (8.0 * denominator(omega, gamma, delta_lambda) * (4.0 * g2 + 3.0 * o2))
}

/// Large-detuning limit of [`cooling_rate_formula`]: `ΓΩ² / 2(4Γ² + 3Ω²)`.
pub fn cooling_rate_large_detuning(omega: f64, gamma: f64) -> f64 {
    let o2 = omega * omega;
    if o2 == 0.0 {
        return 0.0;
    }
    gamma * o2 / (2.0 * (4.0 * gamma * gamma + 3.0 * o2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub fidelity: f64,
    pub heating_rate: f64,
    pub cooling_rate: f64,
    pub cooling_rate_large_detuning: f64,
}

/// All closed-form figures of merit at one parameter point.
pub fn rate_report(omega: f64, gamma: f64, delta_lambda: f64) -> Result<RateReport> {
    let rho = analytic_steady_one_qubit(omega, gamma, delta_lambda)?;
    Ok(RateReport {
        fidelity: fidelity_formula(omega, gamma, delta_lambda),
        heating_rate: heating_rate(&rho, gamma),
        cooling_rate: cooling_rate_formula(omega, gamma, delta_lambda),
        cooling_rate_large_detuning: cooling_rate_large_detuning(omega, gamma),
    })
}

/// Lower and upper edge of the fit window as fractions of the initial gap.
pub const FIT_WINDOW: (f64, f64) = (0.05, 0.60);

/// Exponential approach rate of the fidelity towards `steady_fidelity`.
///
/// Fits `ln(F_ss − F(t))` by least squares over the samples whose gap lies
/// between 5% and 60% of the initial gap, and returns minus the slope. The
/// trajectory must carry a [`FIDELITY`] observable and end within 2% of
/// `steady_fidelity`.
pub fn cooling_rate_fit(traj: &Trajectory, steady_fidelity: f64) -> Result<f64> {
    let f = traj
        .observable(FIDELITY)
        .ok_or_else(|| Error::NotConverged(format!("trajectory has no `{FIDELITY}` observable")))?;
    let t = &traj.times;
    if f.len() < 3 {
        return Err(Error::NotConverged("fewer than three samples".into()));
    }
    let gap0 = steady_fidelity - f[0];
    if gap0.abs() <= 1e-9 {
        return Err(Error::NotConverged("trajectory starts at the stationary fidelity; nothing to fit".into()));
    }
    let last = *f.last().unwrap();
    if (last - steady_fidelity).abs() > 0.02 * steady_fidelity.abs() {
        return Err(Error::NotConverged(format!(
            "final fidelity {last:.6} is not within 2% of the stationary value {steady_fidelity:.6}"
        )));
    }

    let (lo, hi) = FIT_WINDOW;
    let window: Vec<(f64, f64)> = t
        .iter()
        .zip(f)
        .filter_map(|(&ti, &fi)| {
            let ratio = (steady_fidelity - fi) / gap0;
            (lo..=hi).contains(&ratio).then(|| (ti, ratio.ln()))
        })
        .collect();
    if window.len() < 3 {
        return Err(Error::NotConverged(format!(
            "only {} samples inside the fit window; extend t_max or sample more densely",
            window.len()
        )));
    }

    let n = window.len() as f64;
    let mean_t = window.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = window.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = window.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = window.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;

    let last_ratio = (steady_fidelity - last) / gap0;
    if !(slope < 0.0) || last_ratio >= window[0].1.exp() {
        return Err(Error::NonMonotone(format!(
            "fidelity gap is not decreasing (fitted slope {slope:.3e}, final gap ratio {last_ratio:.3e})"
        )));
    }
    Ok(-slope)
}

/// Convenience: `<λ_n|ρ|λ_n>` read off a λ-basis matrix.
pub fn population(rho_lambda: &ComplexMatrix, n: usize) -> f64 {
    rho_lambda[(n, n)].re
}

/// Largest entrywise difference between two complex matrices.
pub fn max_deviation(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    max_abs(&(a - b))
}
