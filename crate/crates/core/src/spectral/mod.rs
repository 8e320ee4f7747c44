//! Dense spectral machinery for small matrices: eigenvalues, tolerance-gated
//! Jordan decomposition, power traces and symmetric-spectrum matching.

mod eigen;
mod jordan;
mod matching;
mod traces;

pub use eigen::{eigenvalues, Spectrum};
pub use jordan::{jordan_decompose, EigenCluster, JordanBlock, JordanStructure, MAX_JORDAN_DIM};
pub use matching::{match_multisets, multiset_symmetry_match, Pairing, SpectralMap};
pub use traces::power_traces;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{relative, ComplexMatrix};

/// Numerical thresholds shared by the spectral and classification code.
///
/// All values are relative to `‖H‖_F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Clustering radius for eigenvalue pairs.
    pub cluster_tol: f64,
    /// Acceptance threshold for reconstruction and defining-equation residuals.
    pub residual_tol: f64,
    /// Singular-value cutoff for rank decisions.
    pub rank_tol: f64,
    /// Backward-error level assumed for defective clusters: a group of `m`
    /// eigenvalues may spread up to `defect_floor^(1/m)` and still be treated
    /// as one perturbed Jordan cluster.
    pub defect_floor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            cluster_tol: 1e-7,
            residual_tol: 1e-8,
            rank_tol: 1e-9,
            defect_floor: 1e-13,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.cluster_tol,
            self.residual_tol,
            self.rank_tol,
            self.defect_floor,
        ];
        if all.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidMatrix(format!(
                "tolerances must be positive and finite: {self:?}"
            )));
        }
        if self.cluster_tol < self.rank_tol {
            return Err(Error::InvalidMatrix(format!(
                "cluster_tol {} must be >= rank_tol {}",
                self.cluster_tol, self.rank_tol
            )));
        }
        Ok(())
    }

    /// Maximum spread (distance to centroid, relative) of a cluster of `m` eigenvalues.
    pub fn cluster_radius(&self, m: usize) -> f64 {
        if m <= 1 {
            0.0
        } else {
            self.cluster_tol.max(self.defect_floor.powf(1.0 / m as f64))
        }
    }
}

/// `‖HH† − H†H‖_F ≤ tol·‖H‖_F²`
pub fn is_normal(h: &ComplexMatrix, tol: f64) -> bool {
    normality_defect(h) <= tol
}

/// `‖[H, H†]‖_F / ‖H‖_F²`
pub fn normality_defect(h: &ComplexMatrix) -> f64 {
    let norm = h.frobenius_norm();
    relative(h.commutator(&h.adjoint()).frobenius_norm(), norm * norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{pauli, C64};

    #[test]
    fn normality_examples() {
        assert!(is_normal(&pauli::sigma_x(), 1e-12));
        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(!is_normal(&nil, 1e-12));
        // [[i,1],[1,-i]]: HH† - H†H = [[0, 4i], [-4i, 0]] by direct multiplication
        let dimer = ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, 1.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, -1.0)],
        ])
        .unwrap();
        assert!(!is_normal(&dimer, 1e-12));
        let comm = dimer.commutator(&dimer.adjoint());
        assert!((comm.get(0, 1) - C64::new(0.0, 4.0)).norm() < 1e-14);
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceConfig::default().validate().is_ok());
        let bad = ToleranceConfig {
            cluster_tol: 1e-12,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let neg = ToleranceConfig {
            residual_tol: -1.0,
            ..Default::default()
        };
        assert!(neg.validate().is_err());
    }

    #[test]
    fn zero_matrix_is_normal() {
        assert!(is_normal(&ComplexMatrix::zeros(3), 1e-12));
    }
}
