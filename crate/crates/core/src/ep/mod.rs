//! Exceptional-point search in parameterized families.
//!
//! Full coalescence of the spectrum of an `n × n` matrix is equivalent to
//! `det H̃ = 0` and `tr H̃^k = 0` for `2 ≤ k < n`, where `H̃` is trace-free.
//! Class membership makes some real and imaginary parts of these invariants
//! vanish identically, which lowers the number of independent real
//! conditions:
//!
//! | class | codimension |
//! |---|---|
//! | pseudo-Hermitian | `n − 1` |
//! | chiral | `n − 1` |
//! | self-skew-similar | `n` (even), `n − 1` (odd) |
//!
//! [`scan`] seeds Gauss–Newton from grid minima of the remaining conditions
//! and certifies each root by its Jordan structure.

mod certify;
mod constraints;
mod scan;

pub use certify::{
    certify_order, splitting_exponent, OrderCertificate, SplittingFit, SPLITTING_T_MAX, SPLITTING_T_MIN,
};
pub use constraints::{
    class_identity_check, reduced_constraints, Constraint, ConstraintSystem, IdentityReport, Invariant,
    Invariants, Part, IDENTITY_TOL, SAMPLE_RANGE,
};
pub use scan::{scan, Axis, EPCandidate, ScanConfig, ScanOutcome, CERTIFY_RESIDUAL};
