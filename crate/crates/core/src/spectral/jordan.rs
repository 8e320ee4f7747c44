use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{eigenvalues, ToleranceConfig};
use crate::error::{Error, Result};
use crate::linalg::{orthonormal_span, right_singular};
use crate::matrix::{relative, ComplexMatrix, C64, ONE};

/// Largest dimension accepted by [`jordan_decompose`].
///
/// Cluster search enumerates eigenvalue subsets, so the cost grows as `2^n`.
pub const MAX_JORDAN_DIM: usize = 12;

/// `cond(Q)` above which a decomposition is flagged as ill-conditioned.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JordanBlock {
    pub eigenvalue: C64,
    pub size: usize,
    /// Index into [`JordanStructure::clusters`].
    pub cluster: usize,
}

/// A group of numerically coalescing eigenvalues and its block structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenCluster {
    pub centroid: C64,
    pub members: Vec<C64>,
    /// Block sizes, largest first.
    pub block_sizes: Vec<usize>,
}

impl EigenCluster {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }

    pub fn geometric_multiplicity(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn largest_block(&self) -> usize {
        self.block_sizes.first().copied().unwrap_or(0)
    }

    /// Largest distance from a member to the centroid.
    pub fn spread(&self) -> f64 {
        spread(&self.members, self.centroid)
    }
}

/// `H = Q J Q⁻¹` with `J` block diagonal in the order of `blocks`.
#[derive(Clone, Debug, Serialize)]
pub struct JordanStructure {
    pub blocks: Vec<JordanBlock>,
    pub clusters: Vec<EigenCluster>,
    pub basis: ComplexMatrix,
    /// `‖H − Q J Q⁻¹‖_F / ‖H‖_F`
    pub residual: f64,
    pub condition_number: f64,
    pub ill_conditioned: bool,
}

impl JordanStructure {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Column offset of each block in `basis`.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |at, b| {
                let start = *at;
                *at += b.size;
                Some(start)
            })
            .collect()
    }

    pub fn jordan_matrix(&self) -> ComplexMatrix {
        let mut j = ComplexMatrix::zeros(self.dim());
        for (block, start) in self.blocks.iter().zip(self.offsets()) {
            for k in 0..block.size {
                j.set(start + k, start + k, block.eigenvalue);
                if k + 1 < block.size {
                    j.set(start + k, start + k + 1, ONE);
                }
            }
        }
        j
    }

    /// Cluster whose centroid is closest to `z`.
    pub fn cluster_nearest(&self, z: C64) -> Option<usize> {
        (0..self.clusters.len()).min_by(|&a, &b| {
            let da = (self.clusters[a].centroid - z).norm();
            let db = (self.clusters[b].centroid - z).norm();
            da.total_cmp(&db)
        })
    }

    pub fn blocks_in(&self, cluster: usize) -> impl Iterator<Item = &JordanBlock> {
        self.blocks.iter().filter(move |b| b.cluster == cluster)
    }
}

/// Jordan decomposition by eigenvalue clustering and rank staircases.
///
/// Schur eigenvalues are grouped so that a group of `m` values spreads at most
/// `cfg.cluster_radius(m)·‖H‖_F` around its centroid μ. For each group the
/// invariant subspace is the numerical null space of `(H − μI)^m`; block sizes
/// follow from the ranks of the compressed nilpotent part and chains are built
/// from the longest block down. Groups whose staircase is inconsistent are
/// split and reprocessed. Two final groups closer than `2·cluster_tol·‖H‖_F`
/// are reported as [`Error::JordanAmbiguity`].
pub fn jordan_decompose(h: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<JordanStructure> {
    cfg.validate()?;
    let n = h.dim();
    if n > MAX_JORDAN_DIM {
        return Err(Error::Unsupported(format!(
            "Jordan decomposition is limited to n <= {MAX_JORDAN_DIM}, got {n}"
        )));
    }
    let norm = h.frobenius_norm();
    if norm == 0.0 {
        return Ok(zero_structure(n));
    }

    let spectrum = eigenvalues(h)?;
    let mut work = partition(&spectrum.values, n, cfg, norm);
    let mut done: Vec<(Vec<C64>, C64, Vec<usize>, DMatrix<C64>)> = Vec::new();
    while let Some(members) = work.pop() {
        let mu = centroid(&members);
        match analyze_cluster(h.as_dmatrix(), norm, mu, members.len(), cfg) {
            Some((sizes, cols)) => done.push((members, mu, sizes, cols)),
            None => work.extend(partition(&members, members.len() - 1, cfg, norm)),
        }
    }
    done.sort_by(|a, b| a.1.re.total_cmp(&b.1.re).then(a.1.im.total_cmp(&b.1.im)));

    let gap = 2.0 * cfg.cluster_tol * norm;
    for i in 0..done.len() {
        for j in i + 1..done.len() {
            let d = min_distance(&done[i].0, &done[j].0);
            if d < gap {
                return Err(Error::JordanAmbiguity(format!(
                    "clusters at {} and {} are {d:e} apart (limit {gap:e})",
                    done[i].1, done[j].1
                )));
            }
        }
    }

    let mut q = DMatrix::<C64>::zeros(n, n);
    let mut blocks = Vec::new();
    let mut clusters = Vec::new();
    let mut at = 0;
    for (idx, (members, mu, sizes, cols)) in done.into_iter().enumerate() {
        q.columns_mut(at, cols.ncols()).copy_from(&cols);
        at += cols.ncols();
        blocks.extend(sizes.iter().map(|&size| JordanBlock {
            eigenvalue: mu,
            size,
            cluster: idx,
        }));
        clusters.push(EigenCluster {
            centroid: mu,
            members,
            block_sizes: sizes,
        });
    }
    debug_assert_eq!(at, n);

    let mut out = JordanStructure {
        blocks,
        clusters,
        basis: ComplexMatrix::wrap(q),
        residual: f64::INFINITY,
        condition_number: f64::INFINITY,
        ill_conditioned: true,
    };
    if let Some(q_inv) = out.basis.try_inverse() {
        let rebuilt = &(&out.basis * &out.jordan_matrix()) * &q_inv;
        out.residual = relative((h - &rebuilt).frobenius_norm(), norm);
        out.condition_number = out.basis.condition_number();
        out.ill_conditioned = !(out.condition_number <= CONDITION_LIMIT && out.residual <= cfg.residual_tol);
    }
    Ok(out)
}

fn zero_structure(n: usize) -> JordanStructure {
    JordanStructure {
        blocks: (0..n)
            .map(|_| JordanBlock {
                eigenvalue: C64::new(0.0, 0.0),
                size: 1,
                cluster: 0,
            })
            .collect(),
        clusters: vec![EigenCluster {
            centroid: C64::new(0.0, 0.0),
            members: vec![C64::new(0.0, 0.0); n],
            block_sizes: vec![1; n],
        }],
        basis: ComplexMatrix::identity(n),
        residual: 0.0,
        condition_number: 1.0,
        ill_conditioned: false,
    }
}

fn centroid(values: &[C64]) -> C64 {
    values.iter().sum::<C64>() / values.len() as f64
}

fn spread(values: &[C64], c: C64) -> f64 {
    values.iter().map(|z| (z - c).norm()).fold(0.0, f64::max)
}

fn min_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| (x - y).norm()))
        .fold(f64::INFINITY, f64::min)
}

/// Greedy partition: repeatedly take the largest admissible subset (ties
/// broken by smallest spread) of at most `max_size` values.
fn partition(values: &[C64], max_size: usize, cfg: &ToleranceConfig, norm: f64) -> Vec<Vec<C64>> {
    let mut rest = values.to_vec();
    let mut out = Vec::new();
    while !rest.is_empty() {
        let k = rest.len();
        let mut best: (usize, f64, u32) = (1, 0.0, 1);
        for mask in 1u32..(1u32 << k) {
            let size = mask.count_ones() as usize;
            if size > max_size || size < best.0 || size == 1 {
                continue;
            }
            let members: Vec<C64> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| rest[i]).collect();
            let s = spread(&members, centroid(&members));
            if s > cfg.cluster_radius(size) * norm {
                continue;
            }
            if size > best.0 || s < best.1 {
                best = (size, s, mask);
            }
        }
        let mask = best.2;
        out.push((0..k).filter(|i| mask >> i & 1 == 1).map(|i| rest[i]).collect());
        rest = (0..k).filter(|i| mask >> i & 1 == 0).map(|i| rest[i]).collect();
    }
    out
}

fn numerical_rank(m: &DMatrix<C64>, tol: f64) -> usize {
    crate::matrix::singular_values(m)
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

/// Block sizes (largest first) and chain columns for one cluster, or `None`
/// if the rank staircase is not that of a nilpotent operator.
fn analyze_cluster(
    h: &DMatrix<C64>,
    norm: f64,
    mu: C64,
    m: usize,
    cfg: &ToleranceConfig,
) -> Option<(Vec<usize>, DMatrix<C64>)> {
    let n = h.nrows();
    let a_full = h - DMatrix::<C64>::identity(n, n) * mu;
    let a_hat = a_full.map(|z| z / norm);

    let mut power = a_hat.clone();
    for _ in 1..m {
        power = &power * &a_hat;
    }
    let (_, right) = right_singular(&power);
    let v = right.columns(n - m, m).into_owned();
    if m == 1 {
        return Some((vec![1], v));
    }
    let b = v.adjoint() * &a_hat * &v;

    let mut ranks = vec![m];
    let mut b_pows = vec![DMatrix::<C64>::identity(m, m)];
    while *ranks.last().unwrap() > 0 && ranks.len() <= m {
        let next = b_pows.last().unwrap() * &b;
        ranks.push(numerical_rank(&next, cfg.rank_tol));
        b_pows.push(next);
    }
    if *ranks.last().unwrap() != 0 || ranks.windows(2).any(|w| w[1] >= w[0]) {
        return None;
    }
    let top = ranks.len() - 1;
    // at_least[k]: number of blocks of size ≥ k
    let at_least: Vec<usize> = (0..=top + 1)
        .map(|k| match k {
            0 => usize::MAX,
            k if k <= top => ranks[k - 1] - ranks[k],
            _ => 0,
        })
        .collect();
    if (1..=top).any(|k| at_least[k + 1] > at_least[k]) {
        return None;
    }
    let exactly: Vec<usize> = (0..=top)
        .map(|k| if k == 0 { 0 } else { at_least[k] - at_least[k + 1] })
        .collect();

    let nulls: Vec<DMatrix<C64>> = (0..=top)
        .map(|s| {
            let dim = m - ranks[s];
            if dim == 0 {
                DMatrix::zeros(m, 0)
            } else {
                let (_, r) = right_singular(&b_pows[s]);
                r.columns(m - dim, dim).into_owned()
            }
        })
        .collect();

    let a_c = v.adjoint() * &a_full * &v;
    let mut heads: Vec<(usize, DVector<C64>)> = Vec::new();
    for s in (1..=top).rev() {
        let count = exactly[s];
        if count == 0 {
            continue;
        }
        let mut avoid: Vec<DVector<C64>> = nulls[s - 1].column_iter().map(|c| c.into_owned()).collect();
        for (t, x) in &heads {
            let mut y = x.clone();
            for _ in 0..t - s {
                y = &a_c * y;
            }
            let ny = y.norm();
            if ny > 0.0 {
                avoid.push(y / C64::from(ny));
            }
        }
        let w = if avoid.is_empty() {
            DMatrix::zeros(m, 0)
        } else {
            orthonormal_span(&DMatrix::from_columns(&avoid), 1e-10)
        };
        let ns = &nulls[s];
        let proj = ns - &w * (w.adjoint() * ns);
        if proj.ncols() < count {
            return None;
        }
        let svd = nalgebra::SVD::try_new(proj, true, false, f64::EPSILON, 0)?;
        let u = svd.u?;
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        for &i in order.iter().take(count) {
            heads.push((s, u.column(i).into_owned()));
        }
    }

    let mut cols = DMatrix::<C64>::zeros(n, m);
    let mut sizes = Vec::with_capacity(heads.len());
    let mut at = 0;
    for (s, x) in heads {
        let mut chain = vec![&v * x];
        for _ in 1..s {
            let next = &a_full * chain.last().unwrap();
            chain.push(next);
        }
        let log_mean = chain
            .iter()
            .map(|c| c.norm().max(f64::MIN_POSITIVE).ln())
            .sum::<f64>()
            / s as f64;
        let g = log_mean.exp();
        for (k, c) in chain.iter().enumerate() {
            cols.set_column(at + s - 1 - k, &(c / C64::from(g)));
        }
        sizes.push(s);
        at += s;
    }
    Some((sizes, cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{C64, I};

    fn decompose(h: &ComplexMatrix) -> JordanStructure {
        jordan_decompose(h, &ToleranceConfig::default()).unwrap()
    }

    fn sizes(j: &JordanStructure) -> Vec<usize> {
        let mut s: Vec<usize> = j.blocks.iter().map(|b| b.size).collect();
        s.sort_unstable();
        s
    }

    #[test]
    fn nilpotent_two() {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let j = decompose(&h);
        assert_eq!(sizes(&j), vec![2]);
        assert!(j.blocks[0].eigenvalue.norm() < 1e-12);
        assert!(j.residual < 1e-12);
        assert!(!j.ill_conditioned);
    }

    #[test]
    fn diagonal_three() {
        let h =
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 3.0]]).unwrap();
        let j = decompose(&h);
        assert_eq!(sizes(&j), vec![1, 1, 1]);
        assert_eq!(j.clusters.len(), 3);
        assert!(j.residual < 1e-14);
    }

    #[test]
    fn trimer_at_exceptional_point() {
        let g = 2f64.sqrt();
        let h = ComplexMatrix::from_rows(&[
            vec![I * g, ONE, C64::new(0.0, 0.0)],
            vec![ONE, C64::new(0.0, 0.0), ONE],
            vec![C64::new(0.0, 0.0), ONE, -I * g],
        ])
        .unwrap();
        let j = decompose(&h);
        assert_eq!(sizes(&j), vec![3]);
        assert!(j.blocks[0].eigenvalue.norm() < 1e-4);
        assert!(j.residual < 1e-8, "residual {}", j.residual);
    }

    #[test]
    fn derogatory_zero_eigenvalue() {
        // J_2(0) ⊕ J_1(0) ⊕ J_1(5)
        let mut h = ComplexMatrix::zeros(4);
        h.set(0, 1, ONE);
        h.set(3, 3, C64::new(5.0, 0.0));
        let j = decompose(&h);
        assert_eq!(sizes(&j), vec![1, 1, 2]);
        let zero = j.cluster_nearest(C64::new(0.0, 0.0)).unwrap();
        assert_eq!(j.clusters[zero].block_sizes, vec![2, 1]);
        assert!(j.residual < 1e-12);
    }

    #[test]
    fn similarity_transformed_block() {
        // P J_3(1+i) P⁻¹ with a well-conditioned P
        let mut jm = ComplexMatrix::zeros(3);
        for k in 0..3 {
            jm.set(k, k, C64::new(1.0, 1.0));
        }
        jm.set(0, 1, ONE);
        jm.set(1, 2, ONE);
        let p = ComplexMatrix::from_rows(&[
            vec![C64::new(2.0, 0.0), C64::new(0.5, 0.1), C64::new(0.0, -0.3)],
            vec![C64::new(0.1, 0.2), C64::new(1.5, 0.0), C64::new(0.4, 0.0)],
            vec![C64::new(-0.2, 0.0), C64::new(0.3, 0.3), C64::new(1.0, 0.5)],
        ])
        .unwrap();
        let h = &(&p * &jm) * &p.try_inverse().unwrap();
        let j = decompose(&h);
        assert_eq!(sizes(&j), vec![3]);
        assert!((j.blocks[0].eigenvalue - C64::new(1.0, 1.0)).norm() < 1e-4);
        assert!(j.residual < 1e-8, "residual {}", j.residual);
    }

    #[test]
    fn close_but_distinct_eigenvalues_are_ambiguous() {
        let h = ComplexMatrix::from_diagonal(&[C64::new(1.0, 0.0), C64::new(1.0 + 1e-7, 0.0)]);
        assert!(matches!(
            jordan_decompose(&h, &ToleranceConfig::default()),
            Err(Error::JordanAmbiguity(_))
        ));
    }

    #[test]
    fn near_but_resolved_eigenvalues() {
        let h = ComplexMatrix::from_diagonal(&[C64::new(0.0, 0.0), C64::new(1e-5, 0.0), C64::new(2.0, 0.0)]);
        let j = decompose(&h);
        assert_eq!(sizes(&j), vec![1, 1, 1]);
        assert_eq!(j.clusters.len(), 3);
    }

    #[test]
    fn zero_matrix() {
        let j = decompose(&ComplexMatrix::zeros(3));
        assert_eq!(sizes(&j), vec![1, 1, 1]);
        assert_eq!(j.residual, 0.0);
    }

    #[test]
    fn dimension_cap() {
        let h = ComplexMatrix::identity(MAX_JORDAN_DIM + 1);
        assert!(matches!(
            jordan_decompose(&h, &ToleranceConfig::default()),
            Err(Error::Unsupported(_))
        ));
    }
}
