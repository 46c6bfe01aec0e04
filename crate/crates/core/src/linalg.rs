//! Dense complex linear algebra used throughout the crate.
//!
//! Operators are plain `nalgebra` dynamic matrices over [`C64`]. The helpers
//! here add the pieces the physics needs on top: Kronecker products with a
//! fixed index convention, Hermitian eigendecomposition with deterministic
//! ordering and phase, and the smallest singular pairs used for null-space
//! extraction.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Tolerance used when checking that an input claimed to be Hermitian is one.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Unit vector `e_index` of length `dim`.
pub fn basis_vector(dim: usize, index: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[index] = ONE;
    v
}

/// `|ket><bra|` for two column vectors.
pub fn outer(ket: &ComplexVector, bra: &ComplexVector) -> ComplexMatrix {
    ket * bra.adjoint()
}

/// Kronecker product with `(a⊗b)[i·p + k, j·q + l] = a[i, j]·b[k, l]` for `b`
/// of shape `p × q`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Conjugate transpose.
pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diagonal().iter().sum()
}

/// Largest entrywise modulus, `max |a_ij|`.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation of `a` from its conjugate transpose.
pub fn hermiticity_error(a: &ComplexMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(a: &ComplexMatrix, tol: f64) -> bool {
    hermiticity_error(a) <= tol
}

/// `[a, b] = ab − ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Column-stacking vectorization: `vec(ρ)[i + d·j] = ρ[i, j]`.
pub fn vectorize(a: &ComplexMatrix) -> ComplexVector {
    // nalgebra stores column-major, so its storage order is exactly column stacking.
    ComplexVector::from_column_slice(a.as_slice())
}

/// Inverse of [`vectorize`] for a square `dim × dim` matrix.
pub fn unvectorize(v: &ComplexVector, dim: usize) -> ComplexMatrix {
    assert_eq!(v.len(), dim * dim, "unvectorize: length is not dim²");
    ComplexMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Result of [`hermitian_eigen`]: ascending eigenvalues, eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> ComplexVector {
        self.eigenvectors.column(k).into_owned()
    }
}

/// Rotate the global phase of `v` so that its largest-magnitude component is
/// real and positive. Ties go to the lowest index.
pub fn fix_phase(v: &mut ComplexVector) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (k, z) in v.iter().enumerate() {
        // Slack so that components equal up to rounding tie deterministically.
        if z.norm() > best_norm + 1e-12 {
            best = k;
            best_norm = z.norm();
        }
    }
    if best_norm <= 0.0 {
        return;
    }
    let phase = v[best].conj() / v[best].norm();
    *v *= phase;
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending, so index 0 is the ground state. Each
/// eigenvector has its phase fixed by [`fix_phase`]. Within a degenerate block
/// the eigenvectors are some orthonormal basis of the block; callers must not
/// rely on which one.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            context: "hermitian_eigen",
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let err = hermiticity_error(a);
    if err > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: err });
    }
    let n = a.nrows();
    let symmetric = (a + a.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(symmetric);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let mut v = eig.eigenvectors.column(src).into_owned();
        fix_phase(&mut v);
        vectors.set_column(dst, &v);
    }
    Ok(HermitianEigen {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

/// A singular value together with its unit-norm right singular vector.
#[derive(Debug, Clone)]
pub struct SingularPair {
    pub value: f64,
    pub vector: ComplexVector,
}

/// The `count` smallest singular values of a square matrix, ascending, with
/// their right singular vectors.
pub fn smallest_singular_pairs(a: &ComplexMatrix, count: usize) -> Vec<SingularPair> {
    let n = a.ncols();
    let svd = SVD::new(a.clone(), false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));

    order
        .into_iter()
        .take(count.min(n))
        .map(|k| {
            // Rows of Vᴴ are conjugated right singular vectors.
            let mut v: ComplexVector = v_t.row(k).adjoint();
            let norm = v.norm();
            if norm > 0.0 {
                v /= C64::new(norm, 0.0);
            }
            SingularPair {
                value: svd.singular_values[k],
                vector: v,
            }
        })
        .collect()
}

/// Pauli matrices in the `{|0>, |1>}` basis with `σ^z|0> = +|0>`.
pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag(values: &[f64]) -> ComplexMatrix {
        let n = values.len();
        let mut m = zeros(n, n);
        for (k, &v) in values.iter().enumerate() {
            m[(k, k)] = real(v);
        }
        m
    }

    /// Entry-by-entry Kronecker product straight from the index formula.
    fn kron_by_definition(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let (p, q) = b.shape();
        let mut out = zeros(a.nrows() * p, a.ncols() * q);
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                for k in 0..p {
                    for l in 0..q {
                        out[(i * p + k, j * q + l)] = a[(i, j)] * b[(k, l)];
                    }
                }
            }
        }
        out
    }

    fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), r * c)
                .prop_map(move |v| {
                    ComplexMatrix::from_iterator(r, c, v.into_iter().map(|(a, b)| C64::new(a, b)))
                })
        })
    }

    fn hermitian_strategy(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
        (1..=max_dim).prop_flat_map(|n| {
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
                let m = ComplexMatrix::from_iterator(n, n, v.into_iter().map(|(a, b)| C64::new(a, b)));
                (&m + m.adjoint()).scale(0.5)
            })
        })
    }

    #[test]
    fn kron_identity_and_pauli() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        assert_eq!(kron(&pauli::z(), &identity(2)), diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn heisenberg_sum_spectrum() {
        let h = kron(&pauli::x(), &pauli::x())
            + kron(&pauli::y(), &pauli::y())
            + kron(&pauli::z(), &pauli::z());
        let eig = hermitian_eigen(&h).unwrap();
        for (got, want) in eig.eigenvalues.iter().zip([-3.0, 1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let ground = eig.vector(0);
        let s = 1.0 / 2f64.sqrt();
        let singlet = ComplexVector::from_vec(vec![ZERO, real(s), real(-s), ZERO]);
        assert!((ground - singlet).norm() < 1e-12);
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(dagger(&identity(3)), identity(3));
        // |e0><g0| in the single-atom basis (g0, g1, e0, e1)
        let mut flip = zeros(4, 4);
        flip[(2, 0)] = ONE;
        let mut back = zeros(4, 4);
        back[(0, 2)] = ONE;
        assert_eq!(dagger(&flip), back);
        let iy = pauli::y() * I;
        assert_eq!(dagger(&iy), pauli::y() * -I);
        assert_eq!(dagger(&dagger(&iy)), iy);
    }

    #[test]
    fn pauli_z_spectrum() {
        let eig = hermitian_eigen(&pauli::z()).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 1.0]);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m = identity(2);
        m[(0, 1)] = ONE;
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn singular_pairs_small_cases() {
        let z = smallest_singular_pairs(&zeros(3, 3), 1);
        assert_eq!(z.len(), 1);
        assert!(z[0].value.abs() < 1e-15);
        assert!((z[0].vector.norm() - 1.0).abs() < 1e-12);

        let d = smallest_singular_pairs(&diag(&[0.0, 5.0]), 2);
        assert!(d[0].value.abs() < 1e-15);
        assert!((d[0].vector[0].norm() - 1.0).abs() < 1e-12);
        assert!((d[1].value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn singular_vector_residual_bound() {
        let m = ComplexMatrix::from_fn(6, 6, |i, j| c((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0 - 1.0));
        for pair in smallest_singular_pairs(&m, 6) {
            assert!((&m * &pair.vector).norm() <= pair.value + 1e-12);
        }
    }

    #[test]
    fn vectorization_is_column_stacking() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| real((10 * i + j) as f64));
        let v = vectorize(&m);
        assert_eq!(v[1], real(10.0));
        assert_eq!(v[3], real(1.0));
        assert_eq!(unvectorize(&v, 3), m);
    }

    #[test]
    fn phase_fixing_prefers_first_of_ties() {
        let mut v = ComplexVector::from_vec(vec![c(0.0, -0.5), c(0.0, 0.5)]);
        fix_phase(&mut v);
        assert!((v[0] - real(0.5)).norm() < 1e-15);
        assert!((v[1] - real(-0.5)).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn kron_matches_index_formula(a in matrix_strategy(4), b in matrix_strategy(4)) {
            let diff = kron(&a, &b) - kron_by_definition(&a, &b);
            prop_assert!(max_abs(&diff) <= 1e-12);
        }

        #[test]
        fn kron_is_associative(a in matrix_strategy(3), b in matrix_strategy(3), m in matrix_strategy(3)) {
            let left = kron(&kron(&a, &b), &m);
            let right = kron(&a, &kron(&b, &m));
            prop_assert!(max_abs(&(left - right)) <= 1e-12);
        }

        #[test]
        fn kron_is_bilinear(a in matrix_strategy(3), b in matrix_strategy(3), s in -2.0..2.0f64, t in -2.0..2.0f64) {
            let a2 = a.map(|z| z * c(0.3, -0.7));
            let lhs = kron(&(a.scale(s) + a2.scale(t)), &b);
            let rhs = kron(&a, &b).scale(s) + kron(&a2, &b).scale(t);
            prop_assert!(max_abs(&(lhs - rhs)) <= 1e-12);
        }

        #[test]
        fn eigen_reconstructs_and_is_orthonormal(a in hermitian_strategy(16)) {
            let eig = hermitian_eigen(&a).unwrap();
            let v = &eig.eigenvectors;
            let lam = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
                eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&x| real(x))));
            let rebuilt = v * lam * v.adjoint();
            let scale = max_abs(&a).max(1e-300);
            prop_assert!(max_abs(&(rebuilt - &a)) / scale <= 1e-9);
            let gram = v.adjoint() * v - identity(a.nrows());
            prop_assert!(max_abs(&gram) <= 1e-10);
            prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            for k in 0..a.nrows() {
                let r = &a * eig.vector(k) - eig.vector(k) * real(eig.eigenvalues[k]);
                prop_assert!(r.norm() <= 1e-9 * scale.max(1.0));
            }
        }
    }
}
