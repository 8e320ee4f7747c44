//! Small SVD-based helpers shared across modules.

use nalgebra::{DMatrix, DVector};

use crate::matrix::C64;

/// Singular values (descending) and the matching right singular vectors as
/// columns. Square or tall input only.
pub(crate) fn right_singular(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    debug_assert!(m.nrows() >= m.ncols());
    let svd = nalgebra::SVD::try_new(m.clone(), false, true, f64::EPSILON, 0)
        .expect("SVD with unbounded iterations");
    let v = svd.v_t.expect("requested V").adjoint();
    (svd.singular_values.iter().copied().collect(), v)
}

/// Same as [`right_singular`] for real matrices.
pub(crate) fn right_singular_real(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    debug_assert!(m.nrows() >= m.ncols());
    let svd = nalgebra::SVD::try_new(m.clone(), false, true, f64::EPSILON, 0)
        .expect("SVD with unbounded iterations");
    let v = svd.v_t.expect("requested V").transpose();
    (svd.singular_values.iter().copied().collect(), v)
}

/// Orthonormal basis (as columns) of the span of `cols`, dropping directions
/// with singular value below `rel_tol·σ_max`.
pub(crate) fn orthonormal_span(cols: &DMatrix<C64>, rel_tol: f64) -> DMatrix<C64> {
    let n = cols.nrows();
    if cols.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = nalgebra::SVD::try_new(cols.clone(), true, false, f64::EPSILON, 0)
        .expect("SVD with unbounded iterations");
    let u = svd.u.expect("requested U");
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..s.len())
        .filter(|&i| s[i] > rel_tol * smax && smax > 0.0)
        .collect();
    DMatrix::from_fn(n, keep.len(), |r, c| u[(r, keep[c])])
}

/// Minimum-norm least-squares solution of `J x = b` with singular values
/// below `rel_cutoff·σ_max` discarded.
pub(crate) fn pseudo_solve(j: &DMatrix<f64>, b: &DVector<f64>, rel_cutoff: f64) -> DVector<f64> {
    let svd = nalgebra::SVD::try_new(j.clone(), true, true, f64::EPSILON, 0)
        .expect("SVD with unbounded iterations");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = if smax > 0.0 {
        rel_cutoff * smax
    } else {
        f64::MIN_POSITIVE
    };
    svd.solve(b, eps).unwrap_or_else(|_| DVector::zeros(j.ncols()))
}
