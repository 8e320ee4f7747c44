use nalgebra::linalg::Schur;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{relative, singular_values, ComplexMatrix, C64};

/// Eigenvalues with algebraic multiplicity, sorted by (re, im).
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub values: Vec<C64>,
    /// `max_i σ_min(H − ε_i I) / ‖H‖_F`
    pub residual: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Σ ε_i^k
    pub fn power_sum(&self, k: u32) -> C64 {
        self.values.iter().map(|e| e.powu(k)).sum()
    }
}

const SCHUR_SWEEPS_PER_DIM: usize = 200;

/// Eigenvalues from the complex Schur form.
pub fn eigenvalues(h: &ComplexMatrix) -> Result<Spectrum> {
    let n = h.dim();
    let max_iter = SCHUR_SWEEPS_PER_DIM * n.max(1);
    let schur = Schur::try_new(h.as_dmatrix().clone(), f64::EPSILON, max_iter)
        .ok_or(Error::NonConvergence { iterations: max_iter })?;
    let (_, t) = schur.unpack();
    let mut values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("eigenvalue".into()));
    }
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let scale = h.frobenius_norm();
    let residual = values
        .iter()
        .map(|&e| {
            let s = singular_values(h.shifted(e).as_dmatrix());
            relative(*s.last().unwrap(), scale)
        })
        .fold(0.0, f64::max);
    Ok(Spectrum { values, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::pauli;

    fn close_sets(got: &[C64], want: &[C64], tol: f64) -> bool {
        crate::spectral::match_multisets(got, want, tol).is_some()
    }

    #[test]
    fn pauli_x() {
        let s = eigenvalues(&pauli::sigma_x()).unwrap();
        assert!(close_sets(
            &s.values,
            &[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)],
            1e-12
        ));
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let s = eigenvalues(&h).unwrap();
        assert!(close_sets(
            &s.values,
            &[C64::new(0.0, 1.0), C64::new(0.0, -1.0)],
            1e-12
        ));
    }

    #[test]
    fn off_diagonal_coupling() {
        // characteristic polynomial ε² = g with g = 4
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[4.0, 0.0]]).unwrap();
        let s = eigenvalues(&h).unwrap();
        assert!(close_sets(
            &s.values,
            &[C64::new(2.0, 0.0), C64::new(-2.0, 0.0)],
            1e-12
        ));
    }

    #[test]
    fn scalar_matrix() {
        let h = ComplexMatrix::from_rows(&[vec![C64::new(0.5, -2.0)]]).unwrap();
        let s = eigenvalues(&h).unwrap();
        assert_eq!(s.values, vec![C64::new(0.5, -2.0)]);
    }
}
