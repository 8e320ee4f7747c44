use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::MatrixFamily;
use crate::matrix::{ComplexMatrix, ZERO};
use crate::spectral::{eigenvalues, jordan_decompose, JordanStructure, ToleranceConfig};

/// Jordan data of the eigenvalue cluster at the origin of `H̃ = H − (tr H/n)·I`.
#[derive(Clone, Debug, Serialize)]
pub struct OrderCertificate {
    /// Largest Jordan block in the cluster.
    pub order: usize,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
    /// One block spanning the whole cluster, of size at least two.
    pub is_ep: bool,
    #[serde(skip)]
    pub jordan: JordanStructure,
}

impl OrderCertificate {
    pub fn describe(&self) -> String {
        if self.is_ep {
            format!("EP{}", self.order)
        } else if self.algebraic_multiplicity > 1 {
            format!(
                "degenerate, not EP{}: {} blocks over multiplicity {}",
                self.algebraic_multiplicity, self.geometric_multiplicity, self.algebraic_multiplicity
            )
        } else {
            "simple eigenvalue".into()
        }
    }
}

/// Certifies the order of the exceptional point at `h` (unshifted input).
pub fn certify_order(h: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<OrderCertificate> {
    let jordan = jordan_decompose(&h.trace_shifted(), cfg)?;
    let c = jordan
        .cluster_nearest(ZERO)
        .ok_or_else(|| Error::InvalidMatrix("empty matrix has no eigenvalues".into()))?;
    let cluster = &jordan.clusters[c];
    let order = cluster.largest_block();
    let algebraic_multiplicity = cluster.multiplicity();
    let geometric_multiplicity = cluster.geometric_multiplicity();
    Ok(OrderCertificate {
        order,
        algebraic_multiplicity,
        geometric_multiplicity,
        is_ep: geometric_multiplicity == 1 && order >= 2,
        jordan,
    })
}

pub const SPLITTING_T_MIN: f64 = 1e-6;
pub const SPLITTING_T_MAX: f64 = 1e-3;
const DIAMETER_FLOOR: f64 = 1e-13;

/// Least-squares fit of `log diam` against `log t`.
#[derive(Clone, Debug, Serialize)]
pub struct SplittingFit {
    /// Slope; `1/m` for a generic EPm.
    pub exponent: f64,
    pub multiplicity: usize,
    pub ts: Vec<f64>,
    pub diameters: Vec<f64>,
    /// Largest deviation of a sample from the fitted line (natural log units).
    pub max_log_deviation: f64,
}

fn diameter(points: &[crate::matrix::C64]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Measures how the coalescing eigenvalues at `lambda_star` separate along
/// `lambda_star + t·direction` for `steps` log-spaced `t ∈ [1e-6, 1e-3]`.
///
/// The multiplicity `m` is that of the cluster certified at `lambda_star`;
/// at each `t` the diameter is taken over the `m` eigenvalues nearest the
/// cluster centroid.
pub fn splitting_exponent(
    f: &MatrixFamily,
    lambda_star: &[f64],
    direction: &[f64],
    steps: usize,
    cfg: &ToleranceConfig,
) -> Result<SplittingFit> {
    if direction.len() != f.num_params || lambda_star.len() != f.num_params {
        return Err(Error::DimensionMismatch(format!(
            "family has {} parameters, got point of length {} and direction of length {}",
            f.num_params,
            lambda_star.len(),
            direction.len()
        )));
    }
    if steps < 3 {
        return Err(Error::InvalidMatrix(
            "splitting fit needs at least 3 steps".into(),
        ));
    }
    if direction.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidMatrix("direction must be nonzero".into()));
    }
    let h0 = f.evaluate(lambda_star)?;
    let cert = certify_order(&h0, cfg)?;
    let cluster = &cert.jordan.clusters[cert.jordan.cluster_nearest(ZERO).expect("nonempty")];
    let m = cluster.multiplicity();
    if m < 2 {
        return Err(Error::InvalidMatrix(format!(
            "no eigenvalue coalescence at {lambda_star:?}"
        )));
    }
    let center = cluster.centroid + h0.trace() / h0.dim() as f64;
    let scale = h0.frobenius_norm().max(f64::MIN_POSITIVE);

    let ratio = (SPLITTING_T_MAX / SPLITTING_T_MIN).ln();
    let mut ts = Vec::with_capacity(steps);
    let mut diameters = Vec::with_capacity(steps);
    for i in 0..steps {
        let t = SPLITTING_T_MIN * (ratio * i as f64 / (steps - 1) as f64).exp();
        let p: Vec<f64> = lambda_star
            .iter()
            .zip(direction)
            .map(|(a, d)| a + t * d)
            .collect();
        let mut values = eigenvalues(&f.evaluate(&p)?)?.values;
        values.sort_by(|a, b| (a - center).norm().total_cmp(&(b - center).norm()));
        let d = diameter(&values[..m]);
        if d > DIAMETER_FLOOR * scale {
            ts.push(t);
            diameters.push(d);
        }
    }
    if ts.len() < 3 {
        return Err(Error::InvalidMatrix(format!(
            "splitting fit degenerate: only {} of {steps} samples above the noise floor",
            ts.len()
        )));
    }
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = diameters.iter().map(|d| d.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let max_log_deviation = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - exponent * x).abs())
        .fold(0.0, f64::max);
    Ok(SplittingFit {
        exponent,
        multiplicity: m,
        ts,
        diameters,
        max_log_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FamilyTerm;
    use crate::matrix::{pauli, I};

    #[test]
    fn nilpotent_is_ep2() {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let c = certify_order(&h, &ToleranceConfig::default()).unwrap();
        assert_eq!((c.order, c.geometric_multiplicity), (2, 1));
        assert!(c.is_ep);
        assert_eq!(c.describe(), "EP2");
    }

    #[test]
    fn zero_is_degenerate() {
        let c = certify_order(&ComplexMatrix::zeros(2), &ToleranceConfig::default()).unwrap();
        assert_eq!((c.order, c.geometric_multiplicity), (1, 2));
        assert!(!c.is_ep);
        assert!(c.describe().starts_with("degenerate"));
    }

    #[test]
    fn shifted_trimer_block() {
        let s = 2f64.sqrt();
        let h = ComplexMatrix::from_rows(&[
            vec![I * s, 1.0.into(), 0.0.into()],
            vec![1.0.into(), 0.0.into(), 1.0.into()],
            vec![0.0.into(), 1.0.into(), -I * s],
        ])
        .unwrap()
        .shifted(-(I * 3.0));
        let c = certify_order(&h, &ToleranceConfig::default()).unwrap();
        assert_eq!(c.order, 3);
        assert!(c.is_ep);
    }

    #[test]
    fn dimer_square_root() {
        let f = MatrixFamily::new(vec![
            FamilyTerm {
                matrix: pauli::sigma_x(),
                exponents: vec![0],
            },
            FamilyTerm {
                matrix: pauli::sigma_z().scale(I),
                exponents: vec![1],
            },
        ])
        .unwrap();
        let fit = splitting_exponent(&f, &[1.0], &[1.0], 10, &ToleranceConfig::default()).unwrap();
        assert!((fit.exponent - 0.5).abs() < 0.02, "{}", fit.exponent);
    }

    #[test]
    fn linear_crossing() {
        let f = MatrixFamily::new(vec![FamilyTerm {
            matrix: pauli::sigma_z(),
            exponents: vec![1],
        }])
        .unwrap();
        let fit = splitting_exponent(&f, &[0.0], &[1.0], 10, &ToleranceConfig::default()).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-6);
    }
}
