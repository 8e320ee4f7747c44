use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SimilarityClass;
use crate::error::{Error, Result};
use crate::matrix::{singular_values, ComplexMatrix, C64, I};
use crate::spectral::normality_defect;

/// Knobs for [`generate_random`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerateOptions {
    /// Reject samples with `‖[H, H†]‖_F / ‖H‖_F² < normality_floor`.
    pub non_normal: bool,
    pub normality_floor: f64,
    /// Minimum `σ_min / σ_max` of the sampled Hermitian factor.
    pub min_relative_singular_value: f64,
    pub max_attempts: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            non_normal: false,
            normality_floor: 1e-2,
            min_relative_singular_value: 1e-2,
            max_attempts: 1000,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    // row-major draw order so the stream does not depend on storage layout
    let mut m = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = gaussian(rng);
        }
    }
    m
}

/// `(G + G†)/2` with standard complex Gaussian `G`.
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    ComplexMatrix::wrap((&g + g.adjoint()) * C64::new(0.5, 0.0))
}

/// Gaussian Hermitian plus a standard-normal real shift, resampled until
/// `σ_min ≥ min_relative·σ_max`. The shift is small enough that the result
/// is generically indefinite.
pub fn random_invertible_hermitian(
    rng: &mut ChaCha8Rng,
    n: usize,
    min_relative: f64,
    max_attempts: usize,
) -> Result<ComplexMatrix> {
    for _ in 0..max_attempts {
        let shift: f64 = rng.sample(StandardNormal);
        let m = random_hermitian(rng, n).shifted(C64::new(-shift, 0.0));
        let s = singular_values(m.as_dmatrix());
        if s[0] > 0.0 && *s.last().unwrap() >= min_relative * s[0] {
            return Ok(m);
        }
    }
    Err(Error::ResamplingExhausted {
        attempts: max_attempts,
        reason: format!("no Hermitian sample with σ_min/σ_max ≥ {min_relative}"),
    })
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix
/// with the phases of `R`'s diagonal removed.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let (q, r) = gaussian_matrix(rng, n, n).qr().unpack();
    let mut q = q;
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    ComplexMatrix::wrap(q)
}

/// Random member of `class`, deterministic in `(class, n, seed)`.
///
/// * pseudo-Hermitian: `H = η A` with invertible Hermitian η, Hermitian A.
/// * chiral: `H = iΓ C` analogously.
/// * self skew-similar: `H = U [[0, B], [C, 0]] U†` with blocks of sizes
///   `p = ⌈n/2⌉`, `q = n − p` and Haar unitary `U`, so that
///   `S = U diag(I_p, −I_q) U†` is Hermitian and anticommutes with H.
///
/// The stream is ChaCha8 seeded with `seed`; Gaussian entries are drawn row
/// by row, real part before imaginary part.
pub fn generate_random(
    class: SimilarityClass,
    n: usize,
    seed: u64,
    options: &GenerateOptions,
) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidMatrix("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..options.max_attempts {
        let h = sample(class, n, &mut rng, options)?;
        if !options.non_normal || normality_defect(&h) >= options.normality_floor {
            return Ok(h);
        }
    }
    Err(Error::ResamplingExhausted {
        attempts: options.max_attempts,
        reason: format!(
            "no {class} sample of dimension {n} with normality defect ≥ {}",
            options.normality_floor
        ),
    })
}

fn sample(
    class: SimilarityClass,
    n: usize,
    rng: &mut ChaCha8Rng,
    options: &GenerateOptions,
) -> Result<ComplexMatrix> {
    match class {
        SimilarityClass::PseudoHermitian | SimilarityClass::Chiral => {
            let t = random_invertible_hermitian(
                rng,
                n,
                options.min_relative_singular_value,
                options.max_attempts,
            )?;
            let a = random_hermitian(rng, n);
            let h = &t * &a;
            Ok(if class == SimilarityClass::Chiral {
                h.scale(I)
            } else {
                h
            })
        }
        SimilarityClass::SelfSkewSimilar => {
            let p = n.div_ceil(2);
            let q = n - p;
            let b = gaussian_matrix(rng, p, q);
            let c = gaussian_matrix(rng, q, p);
            let mut h0 = ComplexMatrix::zeros(n);
            h0.set_block(0, p, &b);
            h0.set_block(p, 0, &c);
            let u = random_unitary(rng, n);
            Ok(&(&u * &h0) * &u.adjoint())
        }
    }
}
