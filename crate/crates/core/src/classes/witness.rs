use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{spectral_condition, spectral_tolerance, SimilarityClass, SimilarityWitness};
use crate::error::{Error, Result};
use crate::linalg::right_singular_real;
use crate::matrix::{exchange, ComplexMatrix, C64, I, ONE};
use crate::spectral::{jordan_decompose, JordanStructure, SpectralMap, ToleranceConfig};

/// Relative singular-value cutoffs tried when extracting the null space of
/// the linearized class equation.
const NULL_CUTOFFS: [f64; 4] = [1e-14, 1e-12, 1e-10, 1e-8];
const RANDOM_COMBINATIONS: usize = 16;
const COMBINATION_SEED: u64 = 0x5eed_0001;

pub fn construct_witness(
    h: &ComplexMatrix,
    class: SimilarityClass,
    cfg: &ToleranceConfig,
) -> Result<SimilarityWitness> {
    match class {
        SimilarityClass::PseudoHermitian => construct_eta(h, cfg),
        SimilarityClass::Chiral => construct_gamma(h, cfg),
        SimilarityClass::SelfSkewSimilar => construct_skew_witness(h, cfg),
    }
}

/// Hermitian invertible η with `H = η H† η⁻¹`.
///
/// Jordan blocks are paired as real-eigenvalue singles and conjugate pairs;
/// the kernel is the exchange matrix on singles and the exchange coupling on
/// pairs, and `η = Q G Q†` is then projected onto the exact solution space.
pub fn construct_eta(h: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<SimilarityWitness> {
    construct_from_jordan(h, SimilarityClass::PseudoHermitian, cfg)
}

/// Hermitian invertible Γ with `H = −Γ H† Γ⁻¹`.
///
/// Imaginary-eigenvalue blocks get `E·D` (exchange times the alternating
/// sign diagonal, times `i` for even sizes so the kernel stays Hermitian);
/// pairs `(a+ib, −a+ib)` are coupled by `E·D` and its adjoint.
pub fn construct_gamma(h: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<SimilarityWitness> {
    construct_from_jordan(h, SimilarityClass::Chiral, cfg)
}

/// Hermitian invertible S with `{H, S} = 0`.
///
/// Conjugation by `Q` does not preserve anticommutation for a congruence
/// `Q G Q†`, so S is taken directly from the Hermitian solution space of
/// `HS + SH = 0`: the best-conditioned of its basis elements and seeded
/// random combinations.
pub fn construct_skew_witness(h: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<SimilarityWitness> {
    let class = SimilarityClass::SelfSkewSimilar;
    cfg.validate()?;
    if h.frobenius_norm() == 0.0 {
        return Ok(SimilarityWitness::evaluate(
            h,
            class,
            ComplexMatrix::identity(h.dim()),
        ));
    }
    if !spectral_condition(h, class, cfg)? {
        return Err(Error::mismatch(class, "spectrum is not symmetric under ε ↦ −ε"));
    }
    let space = HermitianSolutions::new(h, class);
    let candidates = space.combinations();
    select(h, class, candidates, cfg)
}

fn construct_from_jordan(
    h: &ComplexMatrix,
    class: SimilarityClass,
    cfg: &ToleranceConfig,
) -> Result<SimilarityWitness> {
    cfg.validate()?;
    let n = h.dim();
    let norm = h.frobenius_norm();
    if norm == 0.0 {
        return Ok(SimilarityWitness::evaluate(h, class, ComplexMatrix::identity(n)));
    }
    let map = class.spectral_map();
    if !spectral_condition(h, class, cfg)? {
        return Err(Error::mismatch(
            class,
            format!("spectrum is not closed under {map:?}"),
        ));
    }
    let jordan = jordan_decompose(h, cfg)?;
    let partner = pair_blocks(&jordan, map, cfg, norm)
        .ok_or_else(|| Error::mismatch(class, "Jordan blocks cannot be paired"))?;
    let g = kernel(&jordan, &partner, class);
    let q = jordan.basis.as_dmatrix();
    let raw = q * g * q.adjoint();
    let raw = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);

    let space = HermitianSolutions::new(h, class);
    let mut candidates = vec![raw.clone()];
    candidates.extend(space.projections(&raw));
    match select(h, class, candidates, cfg) {
        Ok(w) => Ok(w),
        Err(_) => select(h, class, space.combinations(), cfg),
    }
}

/// Involutive pairing of Jordan blocks minimizing the largest
/// `|map(μ_i) − μ_j|`; only blocks of equal size pair.
fn pair_blocks(
    jordan: &JordanStructure,
    map: SpectralMap,
    cfg: &ToleranceConfig,
    norm: f64,
) -> Option<Vec<usize>> {
    let blocks = &jordan.blocks;
    let k = blocks.len();
    let largest = jordan
        .clusters
        .iter()
        .map(|c| c.multiplicity())
        .max()
        .unwrap_or(1);
    let tol = spectral_tolerance(cfg, largest, norm);
    let cost: Vec<Vec<f64>> = blocks
        .iter()
        .map(|a| {
            blocks
                .iter()
                .map(|b| {
                    if a.size == b.size {
                        (map.apply(a.eigenvalue) - b.eigenvalue).norm()
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        })
        .collect();

    struct Search<'a> {
        cost: &'a [Vec<f64>],
        tol: f64,
        partner: Vec<Option<usize>>,
        best: Option<(f64, Vec<usize>)>,
    }

    impl Search<'_> {
        fn run(&mut self, current: f64) {
            let bound = self.best.as_ref().map_or(f64::INFINITY, |b| b.0);
            let Some(i) = self.partner.iter().position(Option::is_none) else {
                if current < bound {
                    self.best = Some((current, self.partner.iter().map(|p| p.unwrap()).collect()));
                }
                return;
            };
            for j in i..self.partner.len() {
                let c = self.cost[i][j];
                if self.partner[j].is_some() || c > self.tol || current.max(c) >= bound {
                    continue;
                }
                self.partner[i] = Some(j);
                self.partner[j] = Some(i);
                self.run(current.max(c));
                self.partner[i] = None;
                self.partner[j] = None;
                let bound = self.best.as_ref().map_or(f64::INFINITY, |b| b.0);
                if current >= bound {
                    return;
                }
            }
        }
    }

    let mut search = Search {
        cost: &cost,
        tol,
        partner: vec![None; k],
        best: None,
    };
    search.run(0.0);
    search.best.map(|(_, p)| p)
}

/// Alternating sign diagonal `diag(1, −1, 1, …)`.
fn alternating(m: usize) -> DMatrix<C64> {
    DMatrix::from_fn(m, m, |r, c| {
        if r != c {
            C64::new(0.0, 0.0)
        } else if r % 2 == 0 {
            ONE
        } else {
            -ONE
        }
    })
}

/// Block kernel `G` in Jordan coordinates, satisfying `J G = ±G J†`.
fn kernel(jordan: &JordanStructure, partner: &[usize], class: SimilarityClass) -> DMatrix<C64> {
    let n = jordan.dim();
    let offsets = jordan.offsets();
    let mut g = DMatrix::<C64>::zeros(n, n);
    for (i, block) in jordan.blocks.iter().enumerate() {
        let j = partner[i];
        if j < i {
            continue;
        }
        let m = block.size;
        let x = match class {
            SimilarityClass::PseudoHermitian => exchange(m),
            _ => exchange(m) * alternating(m),
        };
        if j == i {
            let x = if class == SimilarityClass::Chiral && m % 2 == 0 {
                x * I
            } else {
                x
            };
            g.view_mut((offsets[i], offsets[i]), (m, m)).copy_from(&x);
        } else {
            g.view_mut((offsets[i], offsets[j]), (m, m)).copy_from(&x);
            g.view_mut((offsets[j], offsets[i]), (m, m))
                .copy_from(&x.adjoint());
        }
    }
    g
}

/// Orthonormal real coordinates on Hermitian n×n matrices: diagonal entries,
/// then `√2·Re X_ij` and `√2·Im X_ij` for `i < j`.
fn hermitian_to_params(x: &DMatrix<C64>) -> DVector<f64> {
    let n = x.nrows();
    let mut p = Vec::with_capacity(n * n);
    for i in 0..n {
        p.push(x[(i, i)].re);
    }
    for i in 0..n {
        for j in i + 1..n {
            p.push(std::f64::consts::SQRT_2 * x[(i, j)].re);
            p.push(std::f64::consts::SQRT_2 * x[(i, j)].im);
        }
    }
    DVector::from_vec(p)
}

fn params_to_hermitian(p: &[f64], n: usize) -> DMatrix<C64> {
    let mut x = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        x[(i, i)] = C64::new(p[i], 0.0);
    }
    let mut k = n;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in i + 1..n {
            let z = C64::new(p[k] * s, p[k + 1] * s);
            x[(i, j)] = z;
            x[(j, i)] = z.conj();
            k += 2;
        }
    }
    x
}

/// Singular structure of the real-linear class map on Hermitian matrices:
/// `X ↦ ĤX − XĤ†`, `ĤX + XĤ†` or `ĤX + XĤ` with `Ĥ = H/‖H‖_F`.
struct HermitianSolutions {
    n: usize,
    singular_values: Vec<f64>,
    right: DMatrix<f64>,
}

impl HermitianSolutions {
    fn new(h: &ComplexMatrix, class: SimilarityClass) -> Self {
        let n = h.dim();
        let hh = h.as_dmatrix() / C64::new(h.frobenius_norm(), 0.0);
        let hd = hh.adjoint();
        let dim = n * n;
        let mut m = DMatrix::<f64>::zeros(2 * dim, dim);
        let mut unit = vec![0.0; dim];
        for k in 0..dim {
            unit[k] = 1.0;
            let x = params_to_hermitian(&unit, n);
            unit[k] = 0.0;
            let image = match class {
                SimilarityClass::PseudoHermitian => &hh * &x - &x * &hd,
                SimilarityClass::Chiral => &hh * &x + &x * &hd,
                SimilarityClass::SelfSkewSimilar => &hh * &x + &x * &hh,
            };
            for (r, z) in image.iter().enumerate() {
                m[(2 * r, k)] = z.re;
                m[(2 * r + 1, k)] = z.im;
            }
        }
        let (singular_values, right) = right_singular_real(&m);
        Self {
            n,
            singular_values,
            right,
        }
    }

    /// Columns of `right` spanning the numerical null space at `cutoff`.
    fn null_basis(&self, cutoff: f64) -> DMatrix<f64> {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        let cols: Vec<usize> = (0..self.singular_values.len())
            .filter(|&k| self.singular_values[k] <= cutoff * smax)
            .collect();
        DMatrix::from_fn(self.right.nrows(), cols.len(), |r, c| self.right[(r, cols[c])])
    }

    /// Orthogonal projections of `x` onto the null spaces at each cutoff.
    fn projections(&self, x: &DMatrix<C64>) -> Vec<DMatrix<C64>> {
        let p = hermitian_to_params(x);
        NULL_CUTOFFS
            .iter()
            .map(|&c| self.null_basis(c))
            .filter(|b| b.ncols() > 0)
            .map(|b| {
                let proj = &b * (b.transpose() * &p);
                params_to_hermitian(proj.as_slice(), self.n)
            })
            .collect()
    }

    /// Null-space basis elements and seeded random combinations.
    fn combinations(&self) -> Vec<DMatrix<C64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(COMBINATION_SEED);
        let mut out = Vec::new();
        for &cutoff in &NULL_CUTOFFS {
            let b = self.null_basis(cutoff);
            if b.ncols() == 0 {
                continue;
            }
            for col in b.column_iter() {
                out.push(params_to_hermitian(col.as_slice(), self.n));
            }
            for _ in 0..RANDOM_COMBINATIONS {
                let coeffs = DVector::from_fn(b.ncols(), |_, _| StandardNormal.sample(&mut rng));
                let p = &b * coeffs;
                out.push(params_to_hermitian(p.as_slice(), self.n));
            }
        }
        out
    }
}

/// Picks the best-conditioned valid candidate, normalized to unit spectral norm.
fn select(
    h: &ComplexMatrix,
    class: SimilarityClass,
    candidates: Vec<DMatrix<C64>>,
    cfg: &ToleranceConfig,
) -> Result<SimilarityWitness> {
    let mut best_valid: Option<SimilarityWitness> = None;
    let mut best_residual: Option<SimilarityWitness> = None;
    for c in candidates {
        let smax = crate::matrix::singular_values(&c)[0];
        if !(smax > 0.0 && smax.is_finite()) {
            continue;
        }
        let t = ComplexMatrix::wrap(c / C64::new(smax, 0.0));
        let w = SimilarityWitness::evaluate(h, class, t);
        if w.is_valid(cfg) {
            if best_valid
                .as_ref()
                .is_none_or(|b| w.min_singular_value > b.min_singular_value)
            {
                best_valid = Some(w);
            }
        } else if w.min_singular_value > cfg.rank_tol
            && best_residual.as_ref().is_none_or(|b| w.residual < b.residual)
        {
            best_residual = Some(w);
        }
    }
    best_valid.ok_or_else(|| {
        let reason = match best_residual {
            Some(w) => format!("best invertible candidate has residual {:e}", w.residual),
            None => "no invertible Hermitian solution".to_string(),
        };
        Error::mismatch(class, reason)
    })
}
