//! The three generalized similarity classes and their Hermitian witnesses.
//!
//! A witness is a Hermitian invertible transform `T` with
//!
//! * pseudo-Hermitian: `H = η H† η⁻¹`
//! * chiral: `H = −Γ H† Γ⁻¹`
//! * self skew-similar: `H = −S H S⁻¹`, equivalently `{H, S} = 0`.
//!
//! Returned transforms are scaled to unit spectral norm, so
//! `min_singular_value` is the reciprocal condition number.

mod generate;
mod special;
mod witness;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use generate::{
    generate_random, random_hermitian, random_invertible_hermitian, random_unitary, GenerateOptions,
};
pub use special::{detect_special_cases, SpecialCase, SpecialCaseReport};
pub use witness::{construct_eta, construct_gamma, construct_skew_witness, construct_witness};

use crate::error::{Error, Result};
use crate::matrix::{relative, ComplexMatrix, C64};
use crate::spectral::{eigenvalues, multiset_symmetry_match, SpectralMap, ToleranceConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SimilarityClass {
    #[serde(rename = "pseudo-hermitian")]
    PseudoHermitian,
    #[serde(rename = "chiral")]
    Chiral,
    #[serde(rename = "self-skew-similar")]
    SelfSkewSimilar,
}

impl SimilarityClass {
    pub const ALL: [SimilarityClass; 3] = [
        SimilarityClass::PseudoHermitian,
        SimilarityClass::Chiral,
        SimilarityClass::SelfSkewSimilar,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            SimilarityClass::PseudoHermitian => "pseudo-hermitian",
            SimilarityClass::Chiral => "chiral",
            SimilarityClass::SelfSkewSimilar => "self-skew-similar",
        }
    }

    /// The spectral reflection the class forces.
    pub fn spectral_map(self) -> SpectralMap {
        match self {
            SimilarityClass::PseudoHermitian => SpectralMap::Conj,
            SimilarityClass::Chiral => SpectralMap::NegConj,
            SimilarityClass::SelfSkewSimilar => SpectralMap::Neg,
        }
    }
}

impl fmt::Display for SimilarityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SimilarityClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "pseudo-hermitian" | "pseudohermitian" | "psh" => Ok(SimilarityClass::PseudoHermitian),
            "chiral" => Ok(SimilarityClass::Chiral),
            "self-skew-similar" | "selfskewsimilar" | "self-skew" | "skew" => {
                Ok(SimilarityClass::SelfSkewSimilar)
            }
            other => Err(Error::Parse(format!(
                "unknown class '{other}' (expected pseudo-hermitian, chiral or self-skew-similar)"
            ))),
        }
    }
}

/// A Hermitian transform certifying class membership.
#[derive(Clone, Debug, Serialize)]
pub struct SimilarityWitness {
    pub class: SimilarityClass,
    pub transform: ComplexMatrix,
    /// Relative residual of the defining equation, see [`defining_residual`].
    pub residual: f64,
    pub hermiticity_defect: f64,
    pub min_singular_value: f64,
}

impl SimilarityWitness {
    /// Evaluates the diagnostics of `transform` against `h`.
    pub fn evaluate(h: &ComplexMatrix, class: SimilarityClass, transform: ComplexMatrix) -> Self {
        let s = transform.singular_values();
        Self {
            class,
            residual: defining_residual(h, class, &transform),
            hermiticity_defect: transform.hermiticity_defect(),
            min_singular_value: relative(*s.last().unwrap(), s[0]),
            transform,
        }
    }

    pub fn is_valid(&self, cfg: &ToleranceConfig) -> bool {
        self.residual <= cfg.residual_tol
            && self.hermiticity_defect <= cfg.residual_tol
            && self.min_singular_value > cfg.rank_tol
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness serializes")
    }
}

/// Relative residual of the class equation for a candidate transform `t`.
///
/// * pseudo-Hermitian: `‖H − T H† T⁻¹‖_F / ‖H‖_F`
/// * chiral: `‖H + T H† T⁻¹‖_F / ‖H‖_F`
/// * self skew-similar: `‖H T + T H‖_F / (‖H‖_F ‖T‖_F)`
///
/// A singular `t` gives `+∞` for the first two.
pub fn defining_residual(h: &ComplexMatrix, class: SimilarityClass, t: &ComplexMatrix) -> f64 {
    let norm = h.frobenius_norm();
    match class {
        SimilarityClass::SelfSkewSimilar => {
            relative(h.anticommutator(t).frobenius_norm(), norm * t.frobenius_norm())
        }
        SimilarityClass::PseudoHermitian | SimilarityClass::Chiral => {
            let Some(t_inv) = t.try_inverse() else {
                return f64::INFINITY;
            };
            let image = &(t * &h.adjoint()) * &t_inv;
            let diff = if class == SimilarityClass::PseudoHermitian {
                h - &image
            } else {
                h + &image
            };
            relative(diff.frobenius_norm(), norm)
        }
    }
}

/// Spectral-gate tolerance: eigenvalues of an `n`-fold defective cluster may
/// be displaced by up to `cluster_radius(n)` under rounding.
pub(crate) fn spectral_tolerance(cfg: &ToleranceConfig, n: usize, norm: f64) -> f64 {
    2.0 * cfg.cluster_tol.max(cfg.cluster_radius(n)) * norm
}

/// Whether the spectrum is invariant under the class reflection.
pub fn spectral_condition(h: &ComplexMatrix, class: SimilarityClass, cfg: &ToleranceConfig) -> Result<bool> {
    let spectrum = eigenvalues(h)?;
    let tol = spectral_tolerance(cfg, h.dim(), h.frobenius_norm());
    Ok(multiset_symmetry_match(&spectrum, class.spectral_map(), tol).is_some())
}

/// Outcome of [`classify`].
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    /// Classes with a verified witness.
    pub witnesses: Vec<SimilarityWitness>,
    /// Classes whose spectral condition holds but whose witness construction
    /// failed, with the reason.
    pub spectral_only: Vec<(SimilarityClass, String)>,
}

impl Classification {
    pub fn classes(&self) -> Vec<SimilarityClass> {
        self.witnesses.iter().map(|w| w.class).collect()
    }

    pub fn contains(&self, class: SimilarityClass) -> bool {
        self.witnesses.iter().any(|w| w.class == class)
    }

    pub fn witness(&self, class: SimilarityClass) -> Option<&SimilarityWitness> {
        self.witnesses.iter().find(|w| w.class == class)
    }
}

/// Tests every class: spectral necessary condition first, then witness
/// construction. Jordan ambiguity aborts the whole classification.
pub fn classify(h: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<Classification> {
    cfg.validate()?;
    let mut out = Classification {
        witnesses: Vec::new(),
        spectral_only: Vec::new(),
    };
    for class in SimilarityClass::ALL {
        if !spectral_condition(h, class, cfg)? {
            continue;
        }
        match construct_witness(h, class, cfg) {
            Ok(w) => out.witnesses.push(w),
            Err(Error::ClassMismatch { reason, .. }) => out.spectral_only.push((class, reason)),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Factorizations exhibiting class membership.
///
/// * pseudo-Hermitian: `(η, A)` with `H = η A`, `A` Hermitian.
/// * chiral: `(Γ, C)` with `H = iΓ C`, `C` Hermitian.
/// * self skew-similar: `(S, H)`, the anticommuting witness and `H` itself.
pub fn factor(
    h: &ComplexMatrix,
    class: SimilarityClass,
    cfg: &ToleranceConfig,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let w = construct_witness(h, class, cfg)?;
    let t = w.transform;
    let inv = || {
        t.try_inverse()
            .ok_or_else(|| Error::mismatch(class, "witness is singular"))
    };
    let second = match class {
        SimilarityClass::SelfSkewSimilar => return Ok((t, h.clone())),
        SimilarityClass::PseudoHermitian => &inv()? * h,
        SimilarityClass::Chiral => (&inv()? * h).scale(C64::new(0.0, -1.0)),
    };
    let defect = second.hermiticity_defect();
    if defect > cfg.residual_tol {
        return Err(Error::mismatch(
            class,
            format!("factor is not Hermitian (defect {defect:e})"),
        ));
    }
    let second =
        ComplexMatrix::wrap((second.as_dmatrix() + second.as_dmatrix().adjoint()) * C64::new(0.5, 0.0));
    Ok((t, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{pauli, I, ONE, ZERO};

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn class_tags_round_trip() {
        for c in SimilarityClass::ALL {
            assert_eq!(c.tag().parse::<SimilarityClass>().unwrap(), c);
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.tag()));
        }
        assert!("hermitian".parse::<SimilarityClass>().is_err());
    }

    #[test]
    fn off_diagonal_coupling_is_in_every_class() {
        // spectrum {±2} is closed under conj, −conj and negation; a direct
        // solve of HΓ + ΓH† = 0 gives Γ = [[a, ib], [−ib, −4a]], invertible
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[4.0, 0.0]]).unwrap();
        let c = classify(&h, &cfg()).unwrap();
        assert_eq!(c.classes(), SimilarityClass::ALL.to_vec());
        for w in &c.witnesses {
            assert!(w.is_valid(&cfg()), "{w:?}");
        }
    }

    #[test]
    fn dimer_at_exceptional_point_is_chiral() {
        let h = ComplexMatrix::from_rows(&[vec![I, ONE], vec![ONE, -I]]).unwrap();
        let c = classify(&h, &cfg()).unwrap();
        assert!(c.contains(SimilarityClass::Chiral));
        // −σz H† σz = H by direct multiplication
        let z = pauli::sigma_z();
        let image = -(&(&z * &h.adjoint()) * &z);
        assert!(image.distance(&h) < 1e-15);
    }

    #[test]
    fn upper_triangular_real_spectrum() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]).unwrap();
        let c = classify(&h, &cfg()).unwrap();
        assert_eq!(c.classes(), vec![SimilarityClass::PseudoHermitian]);
        assert!(c.spectral_only.is_empty());
    }

    #[test]
    fn scalar_cases() {
        let real = ComplexMatrix::from_rows(&[vec![C64::new(2.0, 0.0)]]).unwrap();
        assert_eq!(
            classify(&real, &cfg()).unwrap().classes(),
            vec![SimilarityClass::PseudoHermitian]
        );
        let imag = ComplexMatrix::from_rows(&[vec![C64::new(0.0, -3.0)]]).unwrap();
        assert_eq!(
            classify(&imag, &cfg()).unwrap().classes(),
            vec![SimilarityClass::Chiral]
        );
        let zero = ComplexMatrix::from_rows(&[vec![ZERO]]).unwrap();
        assert_eq!(
            classify(&zero, &cfg()).unwrap().classes(),
            SimilarityClass::ALL.to_vec()
        );
        let generic = ComplexMatrix::from_rows(&[vec![C64::new(1.0, 1.0)]]).unwrap();
        assert!(classify(&generic, &cfg()).unwrap().classes().is_empty());
    }

    #[test]
    fn factor_pseudo_hermitian() {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[4.0, 0.0]]).unwrap();
        let (eta, a) = factor(&h, SimilarityClass::PseudoHermitian, &cfg()).unwrap();
        assert!(eta.hermiticity_defect() < 1e-12);
        assert!(a.hermiticity_defect() < 1e-12);
        assert!((&eta * &a).distance(&h) < 1e-10 * h.frobenius_norm());
    }

    #[test]
    fn factor_chiral_anti_hermitian() {
        let h = pauli::sigma_x().scale(I);
        let (gamma, c) = factor(&h, SimilarityClass::Chiral, &cfg()).unwrap();
        let rebuilt = (&gamma * &c).scale(I);
        assert!(rebuilt.distance(&h) < 1e-12);
        assert!(c.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn factor_hermitian() {
        let h = pauli::sigma_x();
        let (eta, a) = factor(&h, SimilarityClass::PseudoHermitian, &cfg()).unwrap();
        assert!((&eta * &a).distance(&h) < 1e-12);
    }

    #[test]
    fn factor_self_skew_returns_h() {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[3.0, 0.0]]).unwrap();
        let (s, same) = factor(&h, SimilarityClass::SelfSkewSimilar, &cfg()).unwrap();
        assert_eq!(same, h);
        assert!(h.anticommutator(&s).frobenius_norm() < 1e-12);
    }

    #[test]
    fn factor_rejects_non_members() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        assert!(matches!(
            factor(&h, SimilarityClass::SelfSkewSimilar, &cfg()),
            Err(Error::ClassMismatch { .. })
        ));
    }

    #[test]
    fn residual_of_singular_transform() {
        let h = pauli::sigma_x();
        let t = ComplexMatrix::zeros(2);
        assert_eq!(
            defining_residual(&h, SimilarityClass::PseudoHermitian, &t),
            f64::INFINITY
        );
    }
}
