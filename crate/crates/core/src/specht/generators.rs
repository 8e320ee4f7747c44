use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::words::{compare_profiles, word_list, ProfileDifference};
use crate::classes::{construct_witness, generate_random, random_unitary, GenerateOptions, SimilarityClass};
use crate::error::{Error, Result};
use crate::matrix::{pauli, relative, ComplexMatrix, C64};
use crate::solver::{gauss_newton, GaussNewtonConfig};
use crate::spectral::ToleranceConfig;

/// Defect level below which a generator counts as found.
pub const GENERATOR_TOL: f64 = 1e-8;
/// Scaled word-trace difference certifying a failed unitary similarity.
pub const COUNTEREXAMPLE_TOL: f64 = 1e-6;

const RANDOM_STARTS: usize = 16;
const START_SEED: u64 = 0x5eed_0002;
const MAX_COUNTEREXAMPLE_ATTEMPTS: usize = 1000;

/// Unitary and anti-unitary symmetries, each `H = ±U B U†` for a partner `B`
/// and an extra condition on `U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryKind {
    /// `H = A H* A⁻¹`, `AA* = 1`
    Pt,
    /// `H = ς H† ς⁻¹`, `ς² = 1`
    PseudoHermitianSymmetry,
    /// `H = −Θ H* Θ⁻¹`, `ΘΘ* = 1`
    Cp,
    /// `H = −γ H† γ⁻¹`, `γ² = 1`
    ChiralSymmetry,
    /// `H = −S H S⁻¹`, `S² = 1`
    Sublattice,
    /// `H = −X Hᵀ X⁻¹`, `XX* = 1`
    PseudoChiral,
}

/// The extra condition a unitary must satisfy to be a symmetry generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorProperty {
    /// `U U* = 1`
    ConjugateInvolution,
    /// `U² = 1`
    Involution,
}

impl SymmetryKind {
    /// The two symmetries implying membership in `class`.
    pub fn for_class(class: SimilarityClass) -> [SymmetryKind; 2] {
        match class {
            SimilarityClass::PseudoHermitian => [SymmetryKind::Pt, SymmetryKind::PseudoHermitianSymmetry],
            SimilarityClass::Chiral => [SymmetryKind::Cp, SymmetryKind::ChiralSymmetry],
            SimilarityClass::SelfSkewSimilar => [SymmetryKind::Sublattice, SymmetryKind::PseudoChiral],
        }
    }

    pub fn class(self) -> SimilarityClass {
        match self {
            SymmetryKind::Pt | SymmetryKind::PseudoHermitianSymmetry => SimilarityClass::PseudoHermitian,
            SymmetryKind::Cp | SymmetryKind::ChiralSymmetry => SimilarityClass::Chiral,
            SymmetryKind::Sublattice | SymmetryKind::PseudoChiral => SimilarityClass::SelfSkewSimilar,
        }
    }

    /// The matrix `H` must be unitarily similar to.
    pub fn partner(self, h: &ComplexMatrix) -> ComplexMatrix {
        match self {
            SymmetryKind::Pt => h.conj(),
            SymmetryKind::PseudoHermitianSymmetry => h.adjoint(),
            SymmetryKind::Cp => -h.conj(),
            SymmetryKind::ChiralSymmetry => -h.adjoint(),
            SymmetryKind::Sublattice => -h,
            SymmetryKind::PseudoChiral => -h.transpose(),
        }
    }

    pub fn partner_label(self) -> &'static str {
        match self {
            SymmetryKind::Pt => "H*",
            SymmetryKind::PseudoHermitianSymmetry => "H†",
            SymmetryKind::Cp => "-H*",
            SymmetryKind::ChiralSymmetry => "-H†",
            SymmetryKind::Sublattice => "-H",
            SymmetryKind::PseudoChiral => "-Hᵀ",
        }
    }

    pub fn property(self) -> GeneratorProperty {
        match self {
            SymmetryKind::Pt | SymmetryKind::Cp | SymmetryKind::PseudoChiral => {
                GeneratorProperty::ConjugateInvolution
            }
            _ => GeneratorProperty::Involution,
        }
    }

    /// `‖UU* − 1‖_F` or `‖U² − 1‖_F`.
    pub fn property_defect(self, u: &ComplexMatrix) -> f64 {
        let id = ComplexMatrix::identity(u.dim());
        match self.property() {
            GeneratorProperty::ConjugateInvolution => (u * &u.conj()).distance(&id),
            GeneratorProperty::Involution => (u * u).distance(&id),
        }
    }

    /// `‖H − U B U†‖_F / ‖H‖_F` for unitary `U`, computed as `‖HU − UB‖_F / ‖H‖_F`.
    pub fn equation_residual(self, h: &ComplexMatrix, u: &ComplexMatrix) -> f64 {
        let b = self.partner(h);
        relative((&(h * u) - &(u * &b)).frobenius_norm(), h.frobenius_norm())
    }
}

/// Best unitary found for one symmetry.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorFit {
    pub kind: SymmetryKind,
    pub generator: ComplexMatrix,
    pub equation_residual: f64,
    /// `‖U†U − 1‖_F`
    pub unitarity_defect: f64,
    pub property_defect: f64,
    pub found: bool,
}

impl GeneratorFit {
    fn evaluate(h: &ComplexMatrix, kind: SymmetryKind, u: ComplexMatrix) -> Self {
        let equation_residual = kind.equation_residual(h, &u);
        let unitarity_defect = (&u.adjoint() * &u).distance(&ComplexMatrix::identity(u.dim()));
        let property_defect = kind.property_defect(&u);
        Self {
            kind,
            found: equation_residual <= GENERATOR_TOL
                && unitarity_defect <= GENERATOR_TOL
                && property_defect <= GENERATOR_TOL,
            generator: u,
            equation_residual,
            unitarity_defect,
            property_defect,
        }
    }

    fn on_manifold(&self) -> bool {
        self.equation_residual <= GENERATOR_TOL && self.unitarity_defect <= GENERATOR_TOL
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryCheck {
    pub kind: SymmetryKind,
    pub partner: &'static str,
    /// Specht word traces of `H` and the partner agree.
    pub words_match: bool,
    pub word_difference: ProfileDifference,
    pub fit: GeneratorFit,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorReport {
    pub class: SimilarityClass,
    pub witness_residual: f64,
    pub checks: Vec<SymmetryCheck>,
}

impl GeneratorReport {
    pub fn check(&self, kind: SymmetryKind) -> Option<&SymmetryCheck> {
        self.checks.iter().find(|c| c.kind == kind)
    }

    pub fn all_found(&self) -> bool {
        self.checks.iter().all(|c| c.fit.found)
    }
}

fn to_params(u: &ComplexMatrix) -> Vec<f64> {
    let n = u.dim();
    (0..n * n)
        .flat_map(|k| {
            let z = u.get(k / n, k % n);
            [z.re, z.im]
        })
        .collect()
}

fn from_params(x: &[f64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |r, c| {
        let k = r * n + c;
        C64::new(x[2 * k], x[2 * k + 1])
    })
}

fn push_complex(out: &mut Vec<f64>, m: &ComplexMatrix, scale: f64) {
    for r in 0..m.dim() {
        for c in 0..m.dim() {
            let z = m.get(r, c) * scale;
            out.push(z.re);
            out.push(z.im);
        }
    }
}

/// Least-squares residuals of the generator problem; the property block is
/// included when `with_property` is set.
fn generator_residuals(
    h: &ComplexMatrix,
    b: &ComplexMatrix,
    kind: SymmetryKind,
    x: &[f64],
    with_property: bool,
) -> Vec<f64> {
    let n = h.dim();
    let u = from_params(x, n);
    let id = ComplexMatrix::identity(n);
    let mut out = Vec::with_capacity(6 * n * n);
    let inv_norm = 1.0 / h.frobenius_norm().max(f64::MIN_POSITIVE);
    push_complex(&mut out, &(&(h * &u) - &(&u * b)), inv_norm);
    push_complex(&mut out, &(&(&u.adjoint() * &u) - &id), 1.0);
    if with_property {
        let p = match kind.property() {
            GeneratorProperty::ConjugateInvolution => &u * &u.conj(),
            GeneratorProperty::Involution => &u * &u,
        };
        push_complex(&mut out, &(&p - &id), 1.0);
    }
    out
}

/// Rescales `u` by the phase minimizing `‖(e^{iφ}U)² − 1‖_F`, which is the
/// only freedom left on the solution set of an irreducible problem.
fn best_phase(u: &ComplexMatrix, kind: SymmetryKind) -> ComplexMatrix {
    if kind.property() != GeneratorProperty::Involution {
        return u.clone();
    }
    let t = (u * u).trace();
    if t.norm() == 0.0 {
        return u.clone();
    }
    // e^{2iφ} = conj(tr U²)/|tr U²|
    let phase2 = t.conj() / t.norm();
    u.scale(phase2.sqrt())
}

/// Multi-start search for a unitary generator of `kind`.
pub fn fit_generator(h: &ComplexMatrix, kind: SymmetryKind) -> GeneratorFit {
    let n = h.dim();
    let b = kind.partner(h);
    let gn = GaussNewtonConfig {
        tol: 1e-13,
        max_iter: 100,
        polish_iter: 5,
        ..Default::default()
    };
    let mut starts = vec![ComplexMatrix::identity(n)];
    if n == 2 {
        starts.extend([pauli::sigma_x(), pauli::sigma_y(), pauli::sigma_z()]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    starts.extend((0..RANDOM_STARTS).map(|_| random_unitary(&mut rng, n)));

    let mut best: Option<GeneratorFit> = None;
    let better = |cand: &GeneratorFit, best: &Option<GeneratorFit>| match best {
        None => true,
        Some(b) => match (cand.on_manifold(), b.on_manifold()) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => cand.property_defect < b.property_defect,
            (false, false) => {
                cand.equation_residual + cand.unitarity_defect < b.equation_residual + b.unitarity_defect
            }
        },
    };
    for start in starts {
        let stage_a = |x: &[f64]| Ok(generator_residuals(h, &b, kind, x, false));
        let Ok(a) = gauss_newton(stage_a, &to_params(&start), &gn) else {
            continue;
        };
        let u = best_phase(&from_params(&a.x, n), kind);
        let phased = GeneratorFit::evaluate(h, kind, u.clone());
        let stage_b = |x: &[f64]| Ok(generator_residuals(h, &b, kind, x, true));
        let polished = gauss_newton(stage_b, &to_params(&u), &gn)
            .map(|r| GeneratorFit::evaluate(h, kind, from_params(&r.x, n)));
        for cand in std::iter::once(phased).chain(polished.ok()) {
            if better(&cand, &best) {
                best = Some(cand);
            }
        }
        if best.as_ref().is_some_and(|b| b.found) {
            break;
        }
    }
    best.expect("at least one start")
}

/// For a 2×2 member of `class`: compares Specht word traces of `H` with both
/// symmetry partners and searches for the corresponding generators.
pub fn check_similarity_implies_symmetry_2x2(
    h: &ComplexMatrix,
    class: SimilarityClass,
    cfg: &ToleranceConfig,
) -> Result<GeneratorReport> {
    if h.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "generator recovery needs a 2x2 matrix, got {}x{}",
            h.dim(),
            h.dim()
        )));
    }
    let witness = construct_witness(h, class, cfg)?;
    let words = word_list(2)?;
    let mut checks = Vec::new();
    for kind in SymmetryKind::for_class(class) {
        let word_difference = compare_profiles(h, &kind.partner(h), &words)?;
        checks.push(SymmetryCheck {
            kind,
            partner: kind.partner_label(),
            words_match: word_difference.difference <= GENERATOR_TOL,
            word_difference,
            fit: fit_generator(h, kind),
        });
    }
    Ok(GeneratorReport {
        class,
        witness_residual: witness.residual,
        checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PairComparison {
    pub kind: SymmetryKind,
    pub partner: &'static str,
    pub differs: bool,
    #[serde(flatten)]
    pub worst: ProfileDifference,
}

/// A 3×3 class member that is not unitarily similar to the partner of at
/// least one associated symmetry, with the word traces proving it.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub class: SimilarityClass,
    pub seed: u64,
    pub attempts: usize,
    pub matrix: ComplexMatrix,
    pub comparisons: Vec<PairComparison>,
}

impl Counterexample {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("evidence serializes")
    }
}

/// Symmetries that must fail for a certificate: both for pseudo-Hermitian
/// and chiral; pseudo-chiral only for self skew-similar, since a Hermitian
/// anticommuting S always yields the sublattice generator `sign(S)`.
fn required(kind: SymmetryKind) -> bool {
    kind != SymmetryKind::Sublattice
}

/// Draws non-normal 3×3 members of `class` (seeds `seed, seed+1, …`) until
/// the word traces of `H` and the required symmetry partners differ by more
/// than [`COUNTEREXAMPLE_TOL`].
pub fn n3_counterexample(class: SimilarityClass, seed: u64) -> Result<Counterexample> {
    let words = word_list(3)?;
    let opts = GenerateOptions {
        non_normal: true,
        ..Default::default()
    };
    for attempt in 0..MAX_COUNTEREXAMPLE_ATTEMPTS {
        let s = seed.wrapping_add(attempt as u64);
        let h = generate_random(class, 3, s, &opts)?;
        let mut comparisons = Vec::new();
        for kind in SymmetryKind::for_class(class) {
            let worst = compare_profiles(&h, &kind.partner(&h), &words)?;
            comparisons.push(PairComparison {
                kind,
                partner: kind.partner_label(),
                differs: worst.difference > COUNTEREXAMPLE_TOL,
                worst,
            });
        }
        if comparisons.iter().all(|c| c.differs || !required(c.kind)) {
            return Ok(Counterexample {
                class,
                seed: s,
                attempts: attempt + 1,
                matrix: h,
                comparisons,
            });
        }
    }
    Err(Error::ResamplingExhausted {
        attempts: MAX_COUNTEREXAMPLE_ATTEMPTS,
        reason: format!("no 3x3 {class} sample separated from its symmetry partners"),
    })
}
