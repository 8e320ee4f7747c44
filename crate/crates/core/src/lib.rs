//! Generalized similarity classes of finite non-Hermitian matrices.
//!
//! The crate covers three relations between a matrix `H` and its adjoint or
//! negative, each witnessed by an invertible Hermitian transform:
//!
//! | class | relation | spectrum |
//! |---|---|---|
//! | pseudo-Hermitian | `H = η H† η⁻¹` | `{ε} = {ε*}` |
//! | chiral | `H = −Γ H† Γ⁻¹` | `{ε} = {−ε*}` |
//! | self skew-similar | `H = −S H S⁻¹` | `{ε} = {−ε}` |
//!
//! Modules:
//!
//! * [`matrix`] and [`spectral`]: dense complex matrices, eigenvalues, Jordan
//!   decomposition, power traces, symmetric-spectrum matching.
//! * [`classes`]: classification, witness construction, factorization,
//!   random class members, trivial special cases.
//! * [`specht`]: word traces, unitary similarity for `n ≤ 3`, symmetry
//!   generator recovery for `2×2` matrices, `3×3` counterexamples.
//! * [`family`] and [`ep`]: parameterized matrix families, class-reduced
//!   exceptional-point constraints, grid scan with Gauss–Newton refinement,
//!   order certification and eigenvalue splitting exponents.
//! * [`cli`]: the `nhsim` command-line front end.
//!
//! ```
//! use nhsim::classes::{classify, SimilarityClass};
//! use nhsim::matrix::ComplexMatrix;
//! use nhsim::spectral::ToleranceConfig;
//!
//! let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]).unwrap();
//! let result = classify(&h, &ToleranceConfig::default()).unwrap();
//! assert!(result.contains(SimilarityClass::PseudoHermitian));
//! ```

pub mod classes;
pub mod cli;
pub mod ep;
pub mod error;
pub mod family;
mod linalg;
pub mod matrix;
pub mod solver;
pub mod specht;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
