use std::collections::BTreeSet;

use serde::Serialize;

use crate::matrix::{relative, ComplexMatrix};
use crate::spectral::{normality_defect, ToleranceConfig};

/// Trivial symmetries whose generator is the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialCase {
    /// `H = H†`
    Hermitian,
    /// `H = H*`
    Real,
    /// `H = −H†`
    AntiHermitian,
    /// `H = −H*`
    Imaginary,
    /// `H = −Hᵀ`
    AntiSymmetric,
    /// `[H, H†] = 0`
    Normal,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SpecialCaseReport {
    pub flags: BTreeSet<SpecialCase>,
}

impl SpecialCaseReport {
    pub fn has(&self, case: SpecialCase) -> bool {
        self.flags.contains(&case)
    }
}

/// Flags every identity holding within `cfg.residual_tol` relative to `‖H‖_F`
/// (`‖H‖_F²` for normality).
pub fn detect_special_cases(h: &ComplexMatrix, cfg: &ToleranceConfig) -> SpecialCaseReport {
    let norm = h.frobenius_norm();
    let tol = cfg.residual_tol;
    let close = |other: ComplexMatrix| relative(h.distance(&other), norm) <= tol;
    let checks = [
        (SpecialCase::Hermitian, close(h.adjoint())),
        (SpecialCase::Real, close(h.conj())),
        (SpecialCase::AntiHermitian, close(-h.adjoint())),
        (SpecialCase::Imaginary, close(-h.conj())),
        (SpecialCase::AntiSymmetric, close(-h.transpose())),
        (SpecialCase::Normal, normality_defect(h) <= tol),
    ];
    SpecialCaseReport {
        flags: checks.into_iter().filter(|(_, ok)| *ok).map(|(c, _)| c).collect(),
    }
}
