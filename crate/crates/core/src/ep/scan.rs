use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::certify::certify_order;
use super::constraints::{reduced_constraints, ConstraintSystem};
use crate::classes::SimilarityClass;
use crate::error::{Error, Result};
use crate::family::MatrixFamily;
use crate::solver::{gauss_newton, GaussNewtonConfig};
use crate::spectral::{JordanStructure, ToleranceConfig};

/// Residual bound for a converged candidate to be certifiable.
pub const CERTIFY_RESIDUAL: f64 = 1e-8;

/// One grid axis; `points == 1` pins the parameter at `lo`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || points == 0 || (points > 1 && hi <= lo) {
            return Err(Error::Parse(format!("invalid axis {lo}:{hi}:{points}")));
        }
        Ok(Self { lo, hi, points })
    }

    pub fn fixed(value: f64) -> Self {
        Self {
            lo: value,
            hi: value,
            points: 1,
        }
    }

    pub fn is_free(&self) -> bool {
        self.points > 1
    }

    pub fn spacing(&self) -> f64 {
        if self.is_free() {
            (self.hi - self.lo) / (self.points - 1) as f64
        } else {
            0.0
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.hi.max(self.lo)
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanConfig {
    pub axes: Vec<Axis>,
    /// Grid minima with constraint norm at or above this are not refined.
    pub seed_threshold: f64,
    pub newton: GaussNewtonConfig,
    /// Merge radius in units of grid spacing.
    pub merge_radius: f64,
    pub threads: Option<usize>,
    pub tolerances: ToleranceConfig,
}

impl ScanConfig {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self {
            axes,
            seed_threshold: f64::INFINITY,
            newton: GaussNewtonConfig::default(),
            merge_radius: 1e-4,
            threads: None,
            tolerances: ToleranceConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EPCandidate {
    pub point: Vec<f64>,
    /// Grid point the refinement started from.
    pub seed: Vec<f64>,
    /// Largest Jordan block at the origin cluster of `H̃`; 0 if not converged.
    pub order: usize,
    pub geometric_multiplicity: usize,
    pub converged: bool,
    pub certified: bool,
    pub status: String,
    pub constraint_residual: f64,
    pub newton_iterations: usize,
    #[serde(skip)]
    pub jordan: Option<JordanStructure>,
}

impl EPCandidate {
    /// One JSON object; `point` maps parameter names to values.
    pub fn to_json_line(&self, names: &[String]) -> String {
        let point: serde_json::Map<String, serde_json::Value> = names
            .iter()
            .cloned()
            .zip(self.point.iter().map(|v| json!(v)))
            .collect();
        json!({
            "point": point,
            "order": self.order,
            "geometric_multiplicity": self.geometric_multiplicity,
            "converged": self.converged,
            "certified": self.certified,
            "status": self.status,
            "constraint_residual": self.constraint_residual,
            "newton_iterations": self.newton_iterations,
        })
        .to_string()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanOutcome {
    pub class: SimilarityClass,
    pub system: ConstraintSystem,
    pub free_parameters: usize,
    /// Empty when the scan ran normally.
    pub note: Option<String>,
    pub grid_points: usize,
    pub seeds: usize,
    pub dropped_outside: usize,
    pub candidates: Vec<EPCandidate>,
}

impl ScanOutcome {
    pub fn certified(&self) -> impl Iterator<Item = &EPCandidate> {
        self.candidates.iter().filter(|c| c.certified)
    }

    pub fn to_jsonl(&self, names: &[String]) -> String {
        self.candidates
            .iter()
            .map(|c| c.to_json_line(names) + "\n")
            .collect()
    }

    pub fn to_csv(&self, names: &[String]) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = names.to_vec();
        header.extend(
            [
                "order",
                "geometric_multiplicity",
                "converged",
                "certified",
                "status",
                "constraint_residual",
                "newton_iterations",
            ]
            .map(String::from),
        );
        let csv_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        w.write_record(&header).map_err(csv_err)?;
        for c in &self.candidates {
            let mut row: Vec<String> = c.point.iter().map(|v| v.to_string()).collect();
            row.extend([
                c.order.to_string(),
                c.geometric_multiplicity.to_string(),
                c.converged.to_string(),
                c.certified.to_string(),
                c.status.clone(),
                c.constraint_residual.to_string(),
                c.newton_iterations.to_string(),
            ]);
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Grid<'a> {
    axes: &'a [Axis],
    free: Vec<usize>,
}

impl Grid<'_> {
    fn len(&self) -> usize {
        self.free.iter().map(|&i| self.axes[i].points).product()
    }

    /// Multi-index over free axes, last free axis fastest.
    fn index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.free.len()];
        for (k, &a) in self.free.iter().enumerate().rev() {
            let p = self.axes[a].points;
            idx[k] = flat % p;
            flat /= p;
        }
        idx
    }

    fn flat(&self, idx: &[usize]) -> usize {
        self.free
            .iter()
            .zip(idx)
            .fold(0, |acc, (&a, &i)| acc * self.axes[a].points + i)
    }

    fn point(&self, idx: &[usize]) -> Vec<f64> {
        let mut p: Vec<f64> = self.axes.iter().map(|a| a.lo).collect();
        for (&a, &i) in self.free.iter().zip(idx) {
            p[a] = self.axes[a].value(i);
        }
        p
    }

    fn embed(&self, base: &[f64], free_values: &[f64]) -> Vec<f64> {
        let mut p = base.to_vec();
        for (&a, &v) in self.free.iter().zip(free_values) {
            p[a] = v;
        }
        p
    }

    fn normalized_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.free
            .iter()
            .map(|&i| ((a[i] - b[i]) / self.axes[i].spacing()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn inside(&self, p: &[f64]) -> bool {
        self.free.iter().all(|&i| {
            let a = &self.axes[i];
            let s = a.spacing();
            p[i] >= a.lo - s && p[i] <= a.hi + s
        })
    }
}

/// Grid search for exceptional points of `f` within `class`.
///
/// Every grid point whose constraint norm does not exceed any axis neighbour
/// (and is below `seed_threshold`) seeds a Gauss–Newton refinement over the
/// free parameters. Converged points are merged within `merge_radius` grid
/// spacings, certified by their Jordan structure and returned in
/// lexicographic order; non-converged seeds are kept with their iteration
/// counts. Results do not depend on the thread count.
pub fn scan(f: &MatrixFamily, class: SimilarityClass, cfg: &ScanConfig) -> Result<ScanOutcome> {
    if cfg.axes.len() != f.num_params {
        return Err(Error::DimensionMismatch(format!(
            "family has {} parameters but {} axes were given",
            f.num_params,
            cfg.axes.len()
        )));
    }
    cfg.tolerances.validate()?;
    let system = reduced_constraints(f, class)?;
    match cfg.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(|| run(f, class, system, cfg)),
        None => run(f, class, system, cfg),
    }
}

fn run(
    f: &MatrixFamily,
    class: SimilarityClass,
    system: ConstraintSystem,
    cfg: &ScanConfig,
) -> Result<ScanOutcome> {
    let grid = Grid {
        axes: &cfg.axes,
        free: (0..cfg.axes.len()).filter(|&i| cfg.axes[i].is_free()).collect(),
    };
    let d = grid.free.len();
    let note = (d < system.codimension).then(|| {
        format!(
            "{d} free parameter(s) below codimension {}; only non-generic exceptional points can be found",
            system.codimension
        )
    });

    let constraint = |p: &[f64]| -> Result<Vec<f64>> { system.evaluate(&f.evaluate(p)?) };
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            constraint(&grid.point(&grid.index(k)))
                .map(|v| norm(&v))
                .unwrap_or(f64::INFINITY)
        })
        .collect();

    let seeds: Vec<Vec<usize>> = (0..grid.len())
        .filter_map(|k| {
            let v = values[k];
            if !(v.is_finite() && v < cfg.seed_threshold) {
                return None;
            }
            let idx = grid.index(k);
            let is_min = (0..d).all(|axis| {
                let p = cfg.axes[grid.free[axis]].points;
                [idx[axis].checked_sub(1), Some(idx[axis] + 1).filter(|&j| j < p)]
                    .into_iter()
                    .flatten()
                    .all(|j| {
                        let mut n = idx.clone();
                        n[axis] = j;
                        v <= values[grid.flat(&n)]
                    })
            });
            is_min.then_some(idx)
        })
        .collect();

    let refined: Vec<Result<EPCandidate>> = seeds
        .par_iter()
        .map(|idx| {
            let seed = grid.point(idx);
            let x0: Vec<f64> = grid.free.iter().map(|&a| seed[a]).collect();
            let g = |x: &[f64]| constraint(&grid.embed(&seed, x));
            let gn = gauss_newton(g, &x0, &cfg.newton)?;
            let point = grid.embed(&seed, &gn.x);
            let mut c = EPCandidate {
                point,
                seed,
                order: 0,
                geometric_multiplicity: 0,
                converged: gn.converged,
                certified: false,
                status: "not converged".into(),
                constraint_residual: gn.residual_norm,
                newton_iterations: gn.iterations,
                jordan: None,
            };
            if c.converged {
                certify(f, &mut c, &cfg.tolerances);
            }
            Ok(c)
        })
        .collect();

    let mut candidates: Vec<EPCandidate> = Vec::new();
    let mut dropped_outside = 0;
    for c in refined {
        let c = c?;
        if c.converged && !grid.inside(&c.point) {
            dropped_outside += 1;
            continue;
        }
        let duplicate = candidates.iter().any(|o| {
            o.converged == c.converged && grid.normalized_distance(&o.point, &c.point) <= cfg.merge_radius
        });
        if !duplicate {
            candidates.push(c);
        }
    }
    candidates.sort_by(|a, b| {
        a.point
            .iter()
            .zip(&b.point)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.converged.cmp(&a.converged))
    });

    Ok(ScanOutcome {
        class,
        system,
        free_parameters: d,
        note,
        grid_points: grid.len(),
        seeds: seeds.len(),
        dropped_outside,
        candidates,
    })
}

fn certify(f: &MatrixFamily, c: &mut EPCandidate, tol: &ToleranceConfig) {
    if c.constraint_residual > CERTIFY_RESIDUAL {
        c.status = format!("residual {:e} above {CERTIFY_RESIDUAL:e}", c.constraint_residual);
        return;
    }
    let cert = f.evaluate(&c.point).and_then(|h| certify_order(&h, tol));
    match cert {
        Ok(cert) => {
            c.order = cert.order;
            c.geometric_multiplicity = cert.geometric_multiplicity;
            c.certified = cert.is_ep;
            c.status = cert.describe();
            c.jordan = Some(cert.jordan);
        }
        Err(e) => c.status = format!("uncertified: {e}"),
    }
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
        .with_names(&["gamma"])
    }

    #[test]
    fn dimer_has_two_ep2() {
        let cfg = ScanConfig::new(vec![Axis::new(-2.0, 2.0, 101).unwrap()]);
        let out = scan(&dimer(), SimilarityClass::PseudoHermitian, &cfg).unwrap();
        let eps: Vec<_> = out.certified().collect();
        assert_eq!(eps.len(), 2);
        assert!((eps[0].point[0] + 1.0).abs() < 1e-9);
        assert!((eps[1].point[0] - 1.0).abs() < 1e-9);
        assert!(eps.iter().all(|c| c.order == 2 && c.constraint_residual <= 1e-8));
        assert!(out.note.is_none());
    }

    #[test]
    fn thread_count_does_not_matter() {
        let mut cfg = ScanConfig::new(vec![Axis::new(-2.0, 2.0, 37).unwrap()]);
        cfg.threads = Some(1);
        let one = scan(&dimer(), SimilarityClass::PseudoHermitian, &cfg).unwrap();
        cfg.threads = Some(4);
        let four = scan(&dimer(), SimilarityClass::PseudoHermitian, &cfg).unwrap();
        let names = vec!["gamma".to_string()];
        assert_eq!(one.to_jsonl(&names), four.to_jsonl(&names));
    }

    #[test]
    fn hermitian_control_has_none() {
        let f = MatrixFamily::new(vec![
            FamilyTerm {
                matrix: pauli::sigma_x(),
                exponents: vec![0],
            },
            FamilyTerm {
                matrix: pauli::sigma_z(),
                exponents: vec![1],
            },
        ])
        .unwrap();
        let cfg = ScanConfig::new(vec![Axis::new(-2.0, 2.0, 101).unwrap()]);
        let out = scan(&f, SimilarityClass::PseudoHermitian, &cfg).unwrap();
        assert_eq!(out.certified().count(), 0);
        assert!(out.candidates.iter().all(|c| !c.converged));
    }

    #[test]
    fn output_formats() {
        let cfg = ScanConfig::new(vec![Axis::new(0.0, 2.0, 21).unwrap()]);
        let out = scan(&dimer(), SimilarityClass::PseudoHermitian, &cfg).unwrap();
        let names = vec!["gamma".to_string()];
        let line = out.to_jsonl(&names);
        let v: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
        assert_eq!(v["order"], 2);
        assert_eq!(v["point"]["gamma"], 1.0);
        let csv = out.to_csv(&names).unwrap();
        assert!(csv.starts_with("gamma,order,"));
    }

    #[test]
    fn axis_validation() {
        assert!(Axis::new(1.0, 0.0, 5).is_err());
        assert!(Axis::new(0.0, 1.0, 0).is_err());
        assert_eq!(Axis::new(0.0, 1.0, 5).unwrap().value(4), 1.0);
    }
}
