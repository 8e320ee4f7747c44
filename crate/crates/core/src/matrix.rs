//! Dense complex square matrices and the shared matrix JSON format.
//!
//! `ComplexMatrix` wraps a `nalgebra::DMatrix<Complex64>` and guarantees at
//! construction time that the data is square and finite. Arithmetic between
//! matrices returns new `ComplexMatrix` values without re-validating; overflow
//! can only arise from products of huge inputs and is checked where it matters
//! (power traces, determinants).
//!
//! JSON layout, row-major:
//!
//! ```json
//! { "dim": 2, "entries": [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]] }
//! ```

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn new(data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::InvalidMatrix(format!(
                "matrix is {}x{}, expected square",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.nrows() == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if let Some((idx, _)) = data
            .iter()
            .enumerate()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            let (r, c) = (idx % data.nrows(), idx / data.nrows());
            return Err(Error::InvalidMatrix(format!("entry ({r},{c}) is not finite")));
        }
        Ok(Self { data })
    }

    /// Wraps an already-validated result of internal arithmetic.
    pub(crate) fn wrap(data: DMatrix<C64>) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        Self { data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
    }

    /// Real-valued rows, convenient for tests and examples.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(n: usize) -> Self {
        Self::wrap(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self::wrap(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::wrap(DMatrix::from_fn(n, n, |r, c| if r == c { diag[r] } else { ZERO }))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::wrap(DMatrix::from_fn(n, n, f))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[(r, c)] = v;
    }

    /// H†
    pub fn adjoint(&self) -> Self {
        Self::wrap(self.data.adjoint())
    }

    /// H*
    pub fn conj(&self) -> Self {
        Self::wrap(self.data.map(|z| z.conj()))
    }

    /// Hᵀ
    pub fn transpose(&self) -> Self {
        Self::wrap(self.data.transpose())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::wrap(&self.data * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self - shift·I`
    pub fn shifted(&self, shift: C64) -> Self {
        let mut m = self.data.clone();
        for i in 0..self.dim() {
            m[(i, i)] -= shift;
        }
        Self::wrap(m)
    }

    /// `H - (tr H / n)·I`, the traceless part.
    pub fn trace_shifted(&self) -> Self {
        self.shifted(self.trace() / self.dim() as f64)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `[A, B] = AB - BA`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `{A, B} = AB + BA`
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn determinant(&self) -> C64 {
        self.data.clone().lu().determinant()
    }

    pub fn try_inverse(&self) -> Option<Self> {
        self.data.clone().try_inverse().map(Self::wrap)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        singular_values(&self.data)
    }

    /// 2-norm condition number, infinite if singular.
    pub fn condition_number(&self) -> f64 {
        let s = self.singular_values();
        let (max, min) = (s[0], *s.last().unwrap());
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// `‖A - B‖_F`
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }

    /// `‖A - A†‖_F / ‖A‖_F`, zero for the zero matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        relative(self.distance(&self.adjoint()), self.frobenius_norm())
    }

    /// Block-diagonal embedding of `block` at row/col offset.
    pub(crate) fn set_block(&mut self, row: usize, col: usize, block: &DMatrix<C64>) {
        self.data
            .view_mut((row, col), (block.nrows(), block.ncols()))
            .copy_from(block);
    }
}

/// `num / den`, treating `0/0` as zero.
pub(crate) fn relative(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

pub(crate) fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// The m×m exchange matrix (ones on the anti-diagonal).
pub fn exchange(m: usize) -> DMatrix<C64> {
    DMatrix::from_fn(m, m, |r, c| if r + c + 1 == m { ONE } else { ZERO })
}

/// Pauli matrices and small named operators used in examples and tests.
pub mod pauli {
    use super::*;

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap()
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.data)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| {
                    let z = self.data[(r, c)];
                    format!("{:>10.5}{:+.5}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix::wrap(&self.data $op &rhs.data)
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix::wrap(self.data $op rhs.data)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::wrap(-&self.data)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::wrap(-self.data)
    }
}

/// Wire form of a matrix.
#[derive(Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        MatrixJson {
            dim: n,
            entries: (0..n)
                .map(|r| (0..n).map(|c| [m.get(r, c).re, m.get(r, c).im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.dim == 0 {
            return Err(Error::InvalidMatrix("dim must be positive".into()));
        }
        if j.entries.len() != j.dim {
            return Err(Error::InvalidMatrix(format!(
                "dim is {} but entries has {} rows",
                j.dim,
                j.entries.len()
            )));
        }
        let mut rows = Vec::with_capacity(j.dim);
        for (r, row) in j.entries.iter().enumerate() {
            if row.len() != j.dim {
                return Err(Error::InvalidMatrix(format!(
                    "row {r} has {} entries, expected {}",
                    row.len(),
                    j.dim
                )));
            }
            rows.push(row.iter().map(|&[re, im]| C64::new(re, im)).collect());
        }
        ComplexMatrix::from_rows(&rows)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        ComplexMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl ComplexMatrix {
    pub fn from_json(text: &str) -> Result<Self> {
        let j: MatrixJson = serde_json::from_str(text)?;
        ComplexMatrix::try_from(j)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson::from(self)).expect("matrix serialization")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_rejects_non_square() {
        let text = r#"{"dim": 2, "entries": [[[0,0],[1,0]], [[1,0]]]}"#;
        assert!(matches!(
            ComplexMatrix::from_json(text),
            Err(Error::InvalidMatrix(_))
        ));
    }

    #[test]
    fn json_rejects_dim_mismatch() {
        let text = r#"{"dim": 3, "entries": [[[0,0],[1,0]], [[1,0],[0,0]]]}"#;
        assert!(ComplexMatrix::from_json(text).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let m = DMatrix::from_element(2, 2, C64::new(f64::NAN, 0.0));
        assert!(ComplexMatrix::new(m).is_err());
        // serde_json cannot express NaN, but overflowing literals parse to inf
        let text = r#"{"dim": 1, "entries": [[[1e400, 0]]]}"#;
        assert!(ComplexMatrix::from_json(text).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new(1.5, -2.0), C64::new(0.1, 0.2)],
            vec![C64::new(-3.0, 0.0), C64::new(0.0, 1e-300)],
        ])
        .unwrap();
        let back = ComplexMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn exchange_is_involution() {
        let e = exchange(4);
        assert_eq!(&e * &e, DMatrix::identity(4, 4));
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli::sigma_x(), pauli::sigma_y(), pauli::sigma_z());
        assert!((&x * &y).distance(&z.scale(I)) < 1e-15);
        assert!(x.anticommutator(&z).frobenius_norm() < 1e-15);
    }
}
