//! Polynomial matrix families `H(λ) = Σ_t M_t ∏_i λ_i^{e_{t,i}}` over real
//! parameters.
//!
//! JSON schema:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "params": 1,
//!   "names": ["gamma"],
//!   "defaults": [0.0],
//!   "terms": [
//!     { "matrix": { "dim": 2, "entries": [[[0,0],[1,0]],[[1,0],[0,0]]] }, "exponents": [0] },
//!     { "matrix": { "dim": 2, "entries": [[[0,1],[0,0]],[[0,0],[0,-1]]] }, "exponents": [1] }
//!   ]
//! }
//! ```
//!
//! `names` and `defaults` are optional; names default to `p0, p1, …`.

use std::ops::Add;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, MatrixJson, C64};

pub type ParamPoint = Vec<f64>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyTerm {
    pub matrix: ComplexMatrix,
    pub exponents: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixFamily {
    pub dim: usize,
    #[serde(rename = "params")]
    pub num_params: usize,
    pub names: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defaults: Option<Vec<f64>>,
    pub terms: Vec<FamilyTerm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    dim: usize,
    params: usize,
    #[serde(default)]
    names: Option<Vec<String>>,
    #[serde(default)]
    defaults: Option<Vec<f64>>,
    terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    matrix: serde_json::Value,
    exponents: Vec<i64>,
}

/// Parses and validates a family; errors name the offending term.
pub fn parse_family(text: &[u8]) -> Result<MatrixFamily> {
    let raw: RawFamily =
        serde_json::from_slice(text).map_err(|e| Error::Parse(format!("family JSON: {e}")))?;
    if raw.dim == 0 {
        return Err(Error::Parse("dim: must be positive".into()));
    }
    if raw.terms.is_empty() {
        return Err(Error::Parse("terms: at least one term is required".into()));
    }
    let mut terms = Vec::with_capacity(raw.terms.len());
    for (t, term) in raw.terms.into_iter().enumerate() {
        let mj: MatrixJson = serde_json::from_value(term.matrix)
            .map_err(|e| Error::Parse(format!("terms[{t}].matrix: {e}")))?;
        let matrix =
            ComplexMatrix::try_from(mj).map_err(|e| Error::Parse(format!("terms[{t}].matrix: {e}")))?;
        if matrix.dim() != raw.dim {
            return Err(Error::DimensionMismatch(format!(
                "terms[{t}].matrix: dimension {} does not match family dim {}",
                matrix.dim(),
                raw.dim
            )));
        }
        if term.exponents.len() != raw.params {
            return Err(Error::DimensionMismatch(format!(
                "terms[{t}].exponents: expected {} entries, found {}",
                raw.params,
                term.exponents.len()
            )));
        }
        let mut exponents = Vec::with_capacity(raw.params);
        for (i, &e) in term.exponents.iter().enumerate() {
            let e = u32::try_from(e).map_err(|_| {
                Error::Parse(format!(
                    "terms[{t}].exponents[{i}]: exponent {e} must be a nonnegative integer"
                ))
            })?;
            exponents.push(e);
        }
        terms.push(FamilyTerm { matrix, exponents });
    }
    let names = match raw.names {
        Some(n) if n.len() != raw.params => {
            return Err(Error::DimensionMismatch(format!(
                "names: expected {} entries, found {}",
                raw.params,
                n.len()
            )))
        }
        Some(n) => n,
        None => (0..raw.params).map(|i| format!("p{i}")).collect(),
    };
    if let Some(d) = &raw.defaults {
        if d.len() != raw.params {
            return Err(Error::DimensionMismatch(format!(
                "defaults: expected {} entries, found {}",
                raw.params,
                d.len()
            )));
        }
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("defaults: values must be finite".into()));
        }
    }
    Ok(MatrixFamily {
        dim: raw.dim,
        num_params: raw.params,
        names,
        defaults: raw.defaults,
        terms,
    })
}

impl MatrixFamily {
    /// A family from terms; parameter names default to `p0, p1, …`.
    pub fn new(terms: Vec<FamilyTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidMatrix("a family needs at least one term".into()))?;
        let (dim, d) = (first.matrix.dim(), first.exponents.len());
        for (t, term) in terms.iter().enumerate() {
            if term.matrix.dim() != dim || term.exponents.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "term {t}: shape ({}, {}) differs from ({dim}, {d})",
                    term.matrix.dim(),
                    term.exponents.len()
                )));
            }
        }
        Ok(Self {
            dim,
            num_params: d,
            names: (0..d).map(|i| format!("p{i}")).collect(),
            defaults: None,
            terms,
        })
    }

    pub fn with_names(mut self, names: &[&str]) -> Self {
        assert_eq!(names.len(), self.num_params, "one name per parameter");
        self.names = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_defaults(mut self, defaults: &[f64]) -> Self {
        assert_eq!(defaults.len(), self.num_params, "one default per parameter");
        self.defaults = Some(defaults.to_vec());
        self
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family serializes")
    }

    pub fn evaluate(&self, lambda: &[f64]) -> Result<ComplexMatrix> {
        if lambda.len() != self.num_params {
            return Err(Error::DimensionMismatch(format!(
                "family takes {} parameters, got {}",
                self.num_params,
                lambda.len()
            )));
        }
        if lambda.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("parameter point {lambda:?}")));
        }
        let mut acc = DMatrix::<C64>::zeros(self.dim, self.dim);
        for term in &self.terms {
            let coeff: f64 = term
                .exponents
                .iter()
                .zip(lambda)
                .map(|(&e, &l)| l.powi(e as i32))
                .product();
            if coeff != 0.0 {
                acc += term.matrix.as_dmatrix() * C64::new(coeff, 0.0);
            }
        }
        ComplexMatrix::new(acc).map_err(|_| Error::Overflow(format!("H({lambda:?}) is not finite")))
    }

    /// Sum of two families with the same shape.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.num_params != other.num_params {
            return Err(Error::DimensionMismatch(format!(
                "cannot add families of shape ({}, {}) and ({}, {})",
                self.dim, self.num_params, other.dim, other.num_params
            )));
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }
}

/// Panics on shape mismatch; see [`MatrixFamily::checked_add`].
impl Add for &MatrixFamily {
    type Output = MatrixFamily;

    fn add(self, rhs: &MatrixFamily) -> MatrixFamily {
        self.checked_add(rhs).expect("families must share dim and params")
    }
}

/// Central-difference Jacobian `∂g_i/∂λ_j` with steps `h·max(1, |λ_j|)`.
pub fn constraint_jacobian<F>(g: F, lambda0: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let d = lambda0.len();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut x = lambda0.to_vec();
    for j in 0..d {
        let step = h * lambda0[j].abs().max(1.0);
        x[j] = lambda0[j] + step;
        let plus = g(&x)?;
        x[j] = lambda0[j] - step;
        let minus = g(&x)?;
        x[j] = lambda0[j];
        if plus.len() != minus.len() {
            return Err(Error::DimensionMismatch("constraint length changed".into()));
        }
        let col: Vec<f64> = plus
            .iter()
            .zip(&minus)
            .map(|(p, m)| (p - m) / (2.0 * step))
            .collect();
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "constraint derivative near {lambda0:?}"
            )));
        }
        columns.push(col);
    }
    let m = columns.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(m, d, |i, j| columns[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{pauli, I, ONE};

    const DIMER: &str = r#"{
        "dim": 2, "params": 1, "names": ["gamma"],
        "terms": [
            {"matrix": {"dim": 2, "entries": [[[0,0],[1,0]],[[1,0],[0,0]]]}, "exponents": [0]},
            {"matrix": {"dim": 2, "entries": [[[0,1],[0,0]],[[0,0],[0,-1]]]}, "exponents": [1]}
        ]
    }"#;

    #[test]
    fn dimer_evaluation() {
        let f = parse_family(DIMER.as_bytes()).unwrap();
        assert_eq!((f.dim, f.num_params), (2, 1));
        assert_eq!(f.evaluate(&[0.0]).unwrap(), pauli::sigma_x());
        let at1 = ComplexMatrix::from_rows(&[vec![I, ONE], vec![ONE, -I]]).unwrap();
        assert_eq!(f.evaluate(&[1.0]).unwrap(), at1);
        let at2 = ComplexMatrix::from_rows(&[vec![I * 2.0, ONE], vec![ONE, -I * 2.0]]).unwrap();
        assert_eq!(f.evaluate(&[2.0]).unwrap(), at2);
    }

    #[test]
    fn json_round_trip() {
        let f = parse_family(DIMER.as_bytes()).unwrap();
        let again = parse_family(f.to_json().as_bytes()).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let text = r#"{"dim": 2, "params": 1, "terms": [
            {"matrix": {"dim": 2, "entries": [[[0,0],[1,0]],[[1,0],[0,0]]]}, "exponents": [0]},
            {"matrix": {"dim": 3, "entries": [[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]]}, "exponents": [1]}
        ]}"#;
        let err = parse_family(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("terms[1].matrix"), "{err}");
    }

    #[test]
    fn bad_exponents_rejected() {
        let negative = r#"{"dim": 1, "params": 1, "terms": [
            {"matrix": {"dim": 1, "entries": [[[1,0]]]}, "exponents": [-1]}]}"#;
        let err = parse_family(negative.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("terms[0].exponents[0]"), "{err}");
        let short = r#"{"dim": 1, "params": 2, "terms": [
            {"matrix": {"dim": 1, "entries": [[[1,0]]]}, "exponents": [1]}]}"#;
        assert!(parse_family(short.as_bytes())
            .unwrap_err()
            .to_string()
            .contains("terms[0].exponents"));
        assert!(parse_family(b"{\"dim\": 1").is_err());
    }

    #[test]
    fn arity_checked() {
        let f = parse_family(DIMER.as_bytes()).unwrap();
        assert!(matches!(
            f.evaluate(&[1.0, 2.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn jacobian_examples() {
        let j = constraint_jacobian(|x| Ok(vec![x[0] * x[0]]), &[3.0], 1e-5).unwrap();
        assert!((j[(0, 0)] - 6.0).abs() < 1e-8);
        let j = constraint_jacobian(|x| Ok(vec![x[0] * x[1], x[0] + x[1]]), &[1.0, 1.0], 1e-6).unwrap();
        for v in j.iter() {
            assert!((v - 1.0).abs() < 1e-8);
        }
        // det(σx + iγσz) = γ² − 1 has zero slope at γ = 0
        let f = parse_family(DIMER.as_bytes()).unwrap();
        let j = constraint_jacobian(|x| Ok(vec![f.evaluate(x)?.determinant().re]), &[0.0], 1e-6).unwrap();
        assert!(j[(0, 0)].abs() < 1e-6);
    }

    #[test]
    fn jacobian_reports_non_finite() {
        let r = constraint_jacobian(|x| Ok(vec![1.0 / x[0].abs().min(0.0)]), &[0.0], 1e-6);
        assert!(r.is_err());
    }
}
