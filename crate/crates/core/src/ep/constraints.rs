use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classes::SimilarityClass;
use crate::error::{Error, Result};
use crate::family::MatrixFamily;
use crate::matrix::{relative, ComplexMatrix, C64};

/// Tolerance for forced-zero identities, relative to `‖H‖_F^degree`.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Parameter range sampled by [`class_identity_check`].
pub const SAMPLE_RANGE: (f64, f64) = (-2.0, 2.0);
const PRECHECK_SAMPLES: usize = 16;
const PRECHECK_SEED: u64 = 0x5eed_0003;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Part {
    Re,
    Im,
}

/// A complex invariant of `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Invariant {
    /// `det H̃` of the trace-shifted matrix.
    Det,
    /// `tr H̃^k` for `k ≥ 2`; `k = 1` means `tr H` of the unshifted matrix.
    Trace(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub invariant: Invariant,
    pub part: Part,
    pub label: String,
}

fn superscript(k: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

impl Constraint {
    fn new(invariant: Invariant, part: Part) -> Self {
        let p = match part {
            Part::Re => "Re",
            Part::Im => "Im",
        };
        let label = match invariant {
            Invariant::Det => format!("{p} det"),
            Invariant::Trace(1) => format!("{p} tr H"),
            Invariant::Trace(k) => format!("{p} tr H{}", superscript(k)),
        };
        Self {
            invariant,
            part,
            label,
        }
    }

    /// Homogeneity degree in `H`.
    pub fn degree(&self, n: usize) -> u32 {
        match self.invariant {
            Invariant::Det => n as u32,
            Invariant::Trace(k) => k,
        }
    }
}

/// `tr H`, `det H̃` and `tr H̃^k` (`2 ≤ k < n`) with `H̃ = H − (tr H/n)·I`.
#[derive(Clone, Debug)]
pub struct Invariants {
    pub trace: C64,
    pub det: C64,
    /// Index `k − 2` holds `tr H̃^k`.
    pub shifted_traces: Vec<C64>,
    pub norm: f64,
    pub shifted_norm: f64,
}

impl Invariants {
    pub fn of(h: &ComplexMatrix) -> Result<Self> {
        let n = h.dim();
        let shifted = h.trace_shifted();
        let mut shifted_traces = Vec::new();
        let mut power = shifted.clone();
        for _ in 2..n {
            power = &power * &shifted;
            shifted_traces.push(power.trace());
        }
        let det = shifted.determinant();
        let all_finite = std::iter::once(det)
            .chain(shifted_traces.iter().copied())
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !all_finite {
            return Err(Error::Overflow("constraint invariants are not finite".into()));
        }
        Ok(Self {
            trace: h.trace(),
            det,
            shifted_traces,
            norm: h.frobenius_norm(),
            shifted_norm: shifted.frobenius_norm(),
        })
    }

    fn get(&self, inv: Invariant) -> C64 {
        match inv {
            Invariant::Det => self.det,
            Invariant::Trace(1) => self.trace,
            Invariant::Trace(k) => self.shifted_traces[k as usize - 2],
        }
    }

    pub fn value(&self, c: &Constraint) -> f64 {
        let z = self.get(c.invariant);
        match c.part {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }

    /// `|value| / ‖H‖_F^degree` (unshifted norm for `tr H`).
    pub fn relative_value(&self, c: &Constraint, n: usize) -> f64 {
        let scale = match c.invariant {
            Invariant::Trace(1) => self.norm,
            _ => self.shifted_norm,
        };
        relative(self.value(c).abs(), scale.powi(c.degree(n) as i32))
    }
}

/// Real EP conditions for one class: the components of `det H̃` and
/// `tr H̃^k` that the class does not force to vanish.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintSystem {
    pub class: SimilarityClass,
    pub order: usize,
    pub active: Vec<Constraint>,
    /// Components vanishing identically for class members, including the
    /// forced parts of `tr H`.
    pub forced_zero: Vec<Constraint>,
    pub codimension: usize,
}

impl ConstraintSystem {
    /// Number of real conditions for full `n`-fold coalescence in `class`.
    pub fn expected_codimension(class: SimilarityClass, n: usize) -> usize {
        match class {
            SimilarityClass::SelfSkewSimilar if n % 2 == 0 => n,
            _ => n.saturating_sub(1),
        }
    }

    pub fn new(class: SimilarityClass, n: usize) -> Self {
        use Part::{Im, Re};
        let mut active = Vec::new();
        let mut forced = Vec::new();
        let mut put = |inv: Invariant, part: Part, keep: bool| {
            let c = Constraint::new(inv, part);
            if keep {
                active.push(c);
            } else {
                forced.push(c);
            }
        };

        // first moment of the unshifted matrix
        match class {
            SimilarityClass::PseudoHermitian => put(Invariant::Trace(1), Im, false),
            SimilarityClass::Chiral => put(Invariant::Trace(1), Re, false),
            SimilarityClass::SelfSkewSimilar => {
                put(Invariant::Trace(1), Re, false);
                put(Invariant::Trace(1), Im, false);
            }
        }

        // H̃ is zero for n = 1, so its determinant carries no condition
        let (det_re, det_im) = if n < 2 {
            (false, false)
        } else {
            match class {
                SimilarityClass::PseudoHermitian => (true, false),
                SimilarityClass::Chiral => (n % 2 == 0, n % 2 == 1),
                SimilarityClass::SelfSkewSimilar => (n % 2 == 0, n % 2 == 0),
            }
        };
        put(Invariant::Det, Re, det_re);
        put(Invariant::Det, Im, det_im);

        for k in 2..n as u32 {
            let even = k % 2 == 0;
            let (re, im) = match class {
                SimilarityClass::PseudoHermitian => (true, false),
                SimilarityClass::Chiral => (even, !even),
                SimilarityClass::SelfSkewSimilar => (even, even),
            };
            put(Invariant::Trace(k), Re, re);
            put(Invariant::Trace(k), Im, im);
        }

        let codimension = active.len();
        assert_eq!(
            codimension,
            Self::expected_codimension(class, n),
            "constraint count for {class} at n = {n}"
        );
        Self {
            class,
            order: n,
            active,
            forced_zero: forced,
            codimension,
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        self.active.iter().map(|c| c.label.as_str()).collect()
    }

    /// Active constraint values at `h`.
    pub fn evaluate(&self, h: &ComplexMatrix) -> Result<Vec<f64>> {
        let inv = Invariants::of(h)?;
        Ok(self.active.iter().map(|c| inv.value(c)).collect())
    }

    /// Relative magnitudes of the forced-zero components at `h`.
    pub fn forced_values(&self, h: &ComplexMatrix) -> Result<Vec<(&Constraint, f64)>> {
        let inv = Invariants::of(h)?;
        Ok(self
            .forced_zero
            .iter()
            .map(|c| (c, inv.relative_value(c, self.order)))
            .collect())
    }
}

/// Result of sampling the forced-zero identities of a family.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub class: SimilarityClass,
    pub passed: bool,
    pub samples: usize,
    /// Worst identity, its relative value and where it occurred.
    pub worst_label: Option<String>,
    pub worst_value: f64,
    pub worst_point: Vec<f64>,
}

/// Evaluates the class's forced-zero components at `samples` points drawn
/// uniformly from [`SAMPLE_RANGE`] in every parameter.
pub fn class_identity_check(
    f: &MatrixFamily,
    class: SimilarityClass,
    samples: usize,
    seed: u64,
) -> Result<IdentityReport> {
    let system = ConstraintSystem::new(class, f.dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = IdentityReport {
        class,
        passed: true,
        samples,
        worst_label: None,
        worst_value: 0.0,
        worst_point: Vec::new(),
    };
    for _ in 0..samples {
        let point: Vec<f64> = (0..f.num_params)
            .map(|_| rng.random_range(SAMPLE_RANGE.0..=SAMPLE_RANGE.1))
            .collect();
        let h = f.evaluate(&point)?;
        for (c, v) in system.forced_values(&h)? {
            if v > report.worst_value || report.worst_label.is_none() {
                report.worst_value = v;
                report.worst_label = Some(c.label.clone());
                report.worst_point = point.clone();
            }
        }
    }
    report.passed = report.worst_value <= IDENTITY_TOL;
    Ok(report)
}

/// The constraint system of `class` for `f`, after checking on sample points
/// that the family respects the class's forced identities.
pub fn reduced_constraints(f: &MatrixFamily, class: SimilarityClass) -> Result<ConstraintSystem> {
    let report = class_identity_check(f, class, PRECHECK_SAMPLES, PRECHECK_SEED)?;
    if !report.passed {
        return Err(Error::FamilyNotInClass {
            class,
            label: report.worst_label.unwrap_or_default(),
            value: report.worst_value,
            point: report.worst_point,
        });
    }
    Ok(ConstraintSystem::new(class, f.dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FamilyTerm;
    use crate::matrix::{pauli, I};

    fn dimer() -> MatrixFamily {
        MatrixFamily::new(vec![
            FamilyTerm {
                matrix: pauli::sigma_x(),
                exponents: vec![0],
            },
            FamilyTerm {
                matrix: pauli::sigma_z().scale(I),
                exponents: vec![1],
            },
        ])
        .unwrap()
    }

    #[test]
    fn codimensions() {
        for n in 1..=8 {
            for class in SimilarityClass::ALL {
                let s = ConstraintSystem::new(class, n);
                assert_eq!(s.codimension, ConstraintSystem::expected_codimension(class, n));
            }
        }
    }

    #[test]
    fn labels() {
        let s = ConstraintSystem::new(SimilarityClass::PseudoHermitian, 3);
        assert_eq!(s.labels(), vec!["Re det", "Re tr H²"]);
        let s = ConstraintSystem::new(SimilarityClass::SelfSkewSimilar, 2);
        assert_eq!(s.labels(), vec!["Re det", "Im det"]);
        let s = ConstraintSystem::new(SimilarityClass::Chiral, 3);
        assert_eq!(s.labels(), vec!["Im det", "Re tr H²"]);
    }

    #[test]
    fn dimer_pseudo_hermitian() {
        let s = reduced_constraints(&dimer(), SimilarityClass::PseudoHermitian).unwrap();
        assert_eq!(s.labels(), vec!["Re det"]);
        // det(σx + iγσz) = γ² − 1
        let v = s.evaluate(&dimer().evaluate(&[0.5]).unwrap()).unwrap();
        assert!((v[0] - (0.25 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn dimer_is_also_self_skew() {
        // σy anticommutes with both σx and σz
        let r = class_identity_check(&dimer(), SimilarityClass::SelfSkewSimilar, 50, 1).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn scaled_diagonal_is_not_chiral() {
        let f = MatrixFamily::new(vec![FamilyTerm {
            matrix: ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap(),
            exponents: vec![1],
        }])
        .unwrap();
        let r = class_identity_check(&f, SimilarityClass::Chiral, 20, 1).unwrap();
        assert!(!r.passed);
        assert_eq!(r.worst_label.as_deref(), Some("Re tr H"));
        assert!(matches!(
            reduced_constraints(&f, SimilarityClass::Chiral),
            Err(Error::FamilyNotInClass { .. })
        ));
    }
}
