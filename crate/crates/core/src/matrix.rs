//! Dense square matrix carrier shared by Hamiltonians, metrics and Dyson maps.
//!
//! Matrices are stored as a real part plus an optional imaginary part. Every
//! construction in this crate is real; complex input only enters through JSON
//! or [`SquareMatrix::from_complex`].

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Couplings, GraphSpec};

pub type Complex64 = Complex<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    re: DMatrix<f64>,
    im: Option<DMatrix<f64>>,
}

impl SquareMatrix {
    pub fn from_real(re: DMatrix<f64>) -> Result<Self> {
        check_square(&re)?;
        if re.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { re, im: None })
    }

    pub fn from_complex(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Size(format!("{}x{} is not a non-empty square", m.nrows(), m.ncols())));
        }
        let re = m.map(|c| c.re);
        let im = m.map(|c| c.im);
        if re.iter().chain(im.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { re, im: Some(im) })
    }

    pub fn zeros(n: usize) -> Self {
        Self { re: DMatrix::zeros(n, n), im: None }
    }

    pub fn identity(n: usize) -> Self {
        Self { re: DMatrix::identity(n, n), im: None }
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        Self::from_real(DMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { 0.0 }))
    }

    /// Row-major constructor, mostly for tests and fixtures.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Size("rows must all have length n".into()));
        }
        Self::from_real(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.re.nrows()
    }

    /// True when the matrix carries no imaginary part (or an all-zero one).
    pub fn is_real(&self) -> bool {
        self.im.as_ref().is_none_or(|im| im.iter().all(|v| *v == 0.0))
    }

    pub fn real(&self) -> Result<&DMatrix<f64>> {
        if self.is_real() {
            Ok(&self.re)
        } else {
            Err(Error::ComplexInput)
        }
    }

    pub fn into_real(self) -> Result<DMatrix<f64>> {
        if self.is_real() {
            Ok(self.re)
        } else {
            Err(Error::ComplexInput)
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match &self.im {
            Some(im) => DMatrix::from_fn(self.n(), self.n(), |i, j| Complex64::new(self.re[(i, j)], im[(i, j)])),
            None => self.re.map(|v| Complex64::new(v, 0.0)),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let im = self.im.as_ref().map_or(0.0, |m| m[(i, j)]);
        Complex64::new(self.re[(i, j)], im)
    }

    pub fn frobenius_norm(&self) -> f64 {
        let re2 = self.re.norm_squared();
        let im2 = self.im.as_ref().map_or(0.0, |m| m.norm_squared());
        (re2 + im2).sqrt()
    }

    pub fn transpose(&self) -> Self {
        Self { re: self.re.transpose(), im: self.im.as_ref().map(|m| m.transpose()) }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self { re: self.re.transpose(), im: self.im.as_ref().map(|m| -m.transpose()) }
    }

    pub fn to_json(&self, meta: Meta) -> MatrixJson {
        let n = self.n();
        let complex = self.im.is_some();
        let mut data = Vec::with_capacity(if complex { 2 * n * n } else { n * n });
        for i in 0..n {
            for j in 0..n {
                data.push(self.re[(i, j)]);
                if let Some(im) = &self.im {
                    data.push(im[(i, j)]);
                }
            }
        }
        MatrixJson { n, complex, data, meta }
    }
}

impl From<DMatrix<f64>> for SquareMatrix {
    /// Panics on non-square or non-finite input; use [`SquareMatrix::from_real`] to get an error.
    fn from(m: DMatrix<f64>) -> Self {
        Self::from_real(m).expect("square finite matrix")
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Size(format!("{}x{} is not a non-empty square", m.nrows(), m.ncols())));
    }
    Ok(())
}

/// Provenance attached to an exported matrix.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Couplings>,
}

/// Wire form of a matrix: `{"n", "complex", "data", "meta"}` with row-major
/// `data`, interleaving `[re, im]` pairs when `complex` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub complex: bool,
    pub data: Vec<f64>,
    #[serde(default)]
    pub meta: Meta,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<SquareMatrix> {
        let n = self.n;
        let width = if self.complex { 2 } else { 1 };
        if n == 0 || self.data.len() != width * n * n {
            return Err(Error::Size(format!(
                "data has {} numbers, expected {} for n = {n}",
                self.data.len(),
                width * n * n
            )));
        }
        if self.complex {
            let m = DMatrix::from_fn(n, n, |i, j| {
                let k = 2 * (i * n + j);
                Complex64::new(self.data[k], self.data[k + 1])
            });
            SquareMatrix::from_complex(m)
        } else {
            SquareMatrix::from_real(DMatrix::from_fn(n, n, |i, j| self.data[i * n + j]))
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_square_and_non_finite() {
        assert!(SquareMatrix::from_real(DMatrix::zeros(2, 3)).is_err());
        assert!(SquareMatrix::from_real(DMatrix::zeros(0, 0)).is_err());
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert_eq!(SquareMatrix::from_real(m), Err(Error::NonFinite));
    }

    #[test]
    fn json_is_row_major() {
        let m = SquareMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let j = m.to_json(Meta::default());
        assert_eq!(j.data, vec![1.0, 2.0, 3.0, 4.0]);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(text, r#"{"n":2,"complex":false,"data":[1.0,2.0,3.0,4.0],"meta":{}}"#);
    }

    #[test]
    fn complex_json_interleaves_pairs() {
        let m = DMatrix::from_row_slice(1, 1, &[Complex64::new(1.5, -0.25)]);
        let m = SquareMatrix::from_complex(m).unwrap();
        let j = m.to_json(Meta::default());
        assert!(j.complex);
        assert_eq!(j.data, vec![1.5, -0.25]);
        assert_eq!(j.to_matrix().unwrap(), m);
        assert!(!m.is_real());
        assert_eq!(m.real(), Err(Error::ComplexInput));
    }

    #[test]
    fn wrong_data_length_is_rejected() {
        let j = MatrixJson { n: 2, complex: false, data: vec![1.0; 3], meta: Meta::default() };
        assert!(matches!(j.to_matrix(), Err(Error::Size(_))));
    }

    #[test]
    fn adjoint_conjugates() {
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(1.0, 1.0),
            Complex64::new(2.0, 3.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(4.0, -1.0),
        ]);
        let a = SquareMatrix::from_complex(m).unwrap().adjoint();
        assert_eq!(a.get(1, 0), Complex64::new(2.0, -3.0));
        assert_eq!(a.get(0, 0), Complex64::new(1.0, -1.0));
    }
}
