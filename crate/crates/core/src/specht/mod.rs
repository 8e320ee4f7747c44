//! Word traces and Specht's unitary-similarity criterion for small matrices.
//!
//! `A` and `B` are unitarily similar iff `tr w(A, A†) = tr w(B, B†)` for all
//! words `w`; for `n = 2` and `n = 3` a short canonical word list suffices.
//! On top of that this module recovers 2×2 symmetry generators and produces
//! certified 3×3 class members without the corresponding symmetries.

mod generators;
mod words;

pub use generators::{
    check_similarity_implies_symmetry_2x2, fit_generator, n3_counterexample, Counterexample, GeneratorFit,
    GeneratorProperty, GeneratorReport, PairComparison, SymmetryCheck, SymmetryKind, COUNTEREXAMPLE_TOL,
    GENERATOR_TOL,
};
pub use words::{
    compare_profiles, unitary_similarity_test, word_list, word_trace, Letter, ProfileDifference, Word,
    WordTrace, WordTraceProfile,
};
