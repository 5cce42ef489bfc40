//! Dense complex matrix helpers shared across modules.
//!
//! Everything works on `DMatrix<Complex64>`. Hermitian eigensystems come
//! from `SymmetricEigen`, operator norms from singular values; both are
//! deterministic for a given input, which keeps every quadrature and
//! verification run bit-stable.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Frobenius norm (adapter so call sites read uniformly).
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.norm()
}

/// Largest entrywise modulus.
pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Entrywise maximum modulus of `a - b`; the matrices must be the same shape.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs_entry(&(a - b))
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Hermiticity defect `max |A_ij - conj(A_ji)|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Unitarity defect `max |U^H U - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.ncols()))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Check every entry is finite (no NaN/Inf in either component).
pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Require a square matrix, reporting the role name on failure.
pub fn require_square(m: &CMatrix, role: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::input(format!(
            "{role} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// Eigensystem of a Hermitian matrix, eigenvalues ascending with matching
/// eigenvector columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Apply a scalar function to a Hermitian matrix through its eigensystem:
/// `U diag(f(lambda)) U^H`.
pub fn hermitian_map(eigenvalues: &[f64], eigenvectors: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let n = eigenvectors.nrows();
    let mut scaled = CMatrix::zeros(n, n);
    for (k, &lam) in eigenvalues.iter().enumerate() {
        let w = f(lam);
        scaled.set_column(k, &(eigenvectors.column(k) * w));
    }
    scaled * eigenvectors.adjoint()
}
