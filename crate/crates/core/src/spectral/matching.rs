use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::matrix::C64;

/// The three spectral reflections: ε ↦ ε*, ε ↦ −ε*, ε ↦ −ε.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMap {
    Conj,
    NegConj,
    Neg,
}

impl SpectralMap {
    pub fn apply(self, z: C64) -> C64 {
        match self {
            SpectralMap::Conj => z.conj(),
            SpectralMap::NegConj => -z.conj(),
            SpectralMap::Neg => -z,
        }
    }

    /// Nearest point of the map's fixed set (real axis, imaginary axis, origin).
    pub fn project_fixed(self, z: C64) -> C64 {
        match self {
            SpectralMap::Conj => C64::new(z.re, 0.0),
            SpectralMap::NegConj => C64::new(0.0, z.im),
            SpectralMap::Neg => C64::new(0.0, 0.0),
        }
    }
}

/// A bijection `i ↦ targets[i]` between two multisets.
#[derive(Clone, Debug, PartialEq)]
pub struct Pairing {
    pub targets: Vec<usize>,
    /// Largest pair distance (the bottleneck).
    pub max_distance: f64,
}

/// Pairs `S` with `map(S)`: `targets[i] = j` means `S[j] ≈ map(S[i])`.
///
/// Returns the bottleneck-optimal pairing if its largest distance is `≤ tol`.
pub fn multiset_symmetry_match(s: &Spectrum, map: SpectralMap, tol: f64) -> Option<Pairing> {
    let mapped: Vec<C64> = s.values.iter().map(|&z| map.apply(z)).collect();
    match_multisets(&mapped, &s.values, tol)
}

/// Bottleneck assignment between two equal-size multisets of complex numbers.
pub fn match_multisets(a: &[C64], b: &[C64], tol: f64) -> Option<Pairing> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    if n == 0 {
        return Some(Pairing {
            targets: vec![],
            max_distance: 0.0,
        });
    }
    let dist: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    perfect_matching(&dist, tol)?;

    let mut thresholds: Vec<f64> = dist.iter().flatten().copied().filter(|&d| d <= tol).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(&dist, thresholds[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let targets = perfect_matching(&dist, thresholds[lo])?;
    Some(Pairing {
        targets,
        max_distance: thresholds[lo],
    })
}

/// Kuhn's augmenting-path matching on edges with `dist ≤ threshold`.
fn perfect_matching(dist: &[Vec<f64>], threshold: f64) -> Option<Vec<usize>> {
    let n = dist.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];

    fn augment(
        i: usize,
        dist: &[Vec<f64>],
        threshold: f64,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..dist.len() {
            if dist[i][j] <= threshold && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, dist, threshold, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }

    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, dist, threshold, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut targets = vec![0; n];
    for (j, o) in owner.iter().enumerate() {
        targets[o.expect("perfect matching")] = j;
    }
    Some(targets)
}
