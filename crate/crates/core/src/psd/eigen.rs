use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

/// Averages `m` with its adjoint.
pub fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix (symmetrized first).
///
/// Eigenvalues are ascending; the columns of the returned unitary are the
/// matching eigenvectors.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `V diag(w) V*`.
pub fn reconstruct(values: &[f64], vectors: &DMatrix<C64>) -> DMatrix<C64> {
    let mut scaled = vectors.clone();
    for (c, w) in values.iter().enumerate() {
        scaled.column_mut(c).scale_mut(*w);
    }
    scaled * vectors.adjoint()
}

/// Nearest PSD matrix in Frobenius norm; also returns the smallest eigenvalue seen.
pub fn project_psd(m: &DMatrix<C64>) -> (DMatrix<C64>, f64) {
    if m.nrows() == 0 {
        return (m.clone(), 0.0);
    }
    let (mut w, v) = hermitian_eigen(m);
    let min = w[0];
    if min >= 0.0 {
        return (hermitize(m), min);
    }
    for x in w.iter_mut() {
        *x = x.max(0.0);
    }
    (reconstruct(&w, &v), min)
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}
