use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type C64 = Complex<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Smallest field containing both operands.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dense square matrix over ℝ or ℂ.
///
/// Entries are always stored as complex numbers; a `Real` matrix has every
/// imaginary part exactly zero, and operations between real operands keep
/// that property. The field is never inferred from the data.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    field: Field,
    data: DMatrix<C64>,
}

impl Mat {
    pub fn new(field: Field, data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::ShapeError(format!(
                "matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if field == Field::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(Error::FieldError(
                "real matrix has entries with nonzero imaginary part".into(),
            ));
        }
        Ok(Self { field, data })
    }

    /// Builds from trusted data produced inside the crate.
    pub(crate) fn from_parts(field: Field, mut data: DMatrix<C64>) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        if field == Field::Real {
            data.iter_mut().for_each(|z| z.im = 0.0);
        }
        Self { field, data }
    }

    pub fn from_real(n: usize, row_major: &[f64]) -> Result<Self> {
        if row_major.len() != n * n {
            return Err(Error::ShapeError(format!(
                "expected {} entries for n={n}, got {}",
                n * n,
                row_major.len()
            )));
        }
        Self::new(
            Field::Real,
            DMatrix::from_row_iterator(n, n, row_major.iter().map(|&x| C64::new(x, 0.0))),
        )
    }

    pub fn from_complex(n: usize, row_major: &[C64]) -> Result<Self> {
        if row_major.len() != n * n {
            return Err(Error::ShapeError(format!(
                "expected {} entries for n={n}, got {}",
                n * n,
                row_major.len()
            )));
        }
        Self::new(
            Field::Complex,
            DMatrix::from_row_iterator(n, n, row_major.iter().copied()),
        )
    }

    pub fn from_real_dmatrix(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(Field::Real, m.map(|x| C64::new(x, 0.0)))
    }

    pub fn from_fn(field: Field, n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::from_parts(field, DMatrix::from_fn(n, n, f))
    }

    pub fn zeros(field: Field, n: usize) -> Self {
        Self::from_parts(field, DMatrix::zeros(n, n))
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Self::from_parts(field, DMatrix::identity(n, n))
    }

    /// Matrix unit `E_ij` (zero-based indices).
    pub fn unit(field: Field, n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(field, n);
        m.data[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    pub fn diag(field: Field, d: &[f64]) -> Self {
        let n = d.len();
        Self::from_fn(field, n, |i, j| {
            if i == j {
                C64::new(d[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<C64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    /// Same entries viewed over ℂ.
    pub fn to_complex(&self) -> Mat {
        Self {
            field: Field::Complex,
            data: self.data.clone(),
        }
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.data.map(|z| z.re)
    }

    pub fn adjoint(&self) -> Mat {
        Self::from_parts(self.field, self.data.adjoint())
    }

    pub fn transpose(&self) -> Mat {
        Self::from_parts(self.field, self.data.transpose())
    }

    /// Multiplies by a scalar; a non-real scalar promotes a real matrix to ℂ.
    pub fn scale(&self, c: C64) -> Mat {
        let field = if c.im != 0.0 {
            Field::Complex
        } else {
            self.field
        };
        Self::from_parts(field, &self.data * c)
    }

    pub fn scale_real(&self, c: f64) -> Mat {
        Self::from_parts(self.field, &self.data * C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Max-entry distance to `other`.
    pub fn dist_max(&self, other: &Mat) -> f64 {
        (&self.data - &other.data)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `a ⊕ b`.
    pub fn direct_sum(a: &Mat, b: &Mat) -> Mat {
        let (p, q) = (a.n(), b.n());
        let mut d = DMatrix::zeros(p + q, p + q);
        d.view_mut((0, 0), (p, p)).copy_from(&a.data);
        d.view_mut((p, p), (q, q)).copy_from(&b.data);
        Self::from_parts(a.field.join(b.field), d)
    }

    /// Square principal block starting at `start` of side `size`.
    pub fn principal_block(&self, start: usize, size: usize) -> Mat {
        Self::from_parts(
            self.field,
            self.data.view((start, start), (size, size)).into_owned(),
        )
    }

    /// Arbitrary rectangular block as a raw matrix.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> DMatrix<C64> {
        self.data.view((r0, c0), (nr, nc)).into_owned()
    }

    /// Column-major vectorization `vec(X)`.
    pub fn vec_col_major(&self) -> DVector<C64> {
        DVector::from_iterator(self.n() * self.n(), self.data.iter().copied())
    }

    pub fn from_vec_col_major(field: Field, n: usize, v: &DVector<C64>) -> Mat {
        debug_assert_eq!(v.len(), n * n);
        Self::from_parts(field, DMatrix::from_column_slice(n, n, v.as_slice()))
    }

    /// Real coordinates for ℝ-linear spans: `re` per entry over ℝ, and the
    /// interleaved `(re, im)` pair per entry over ℂ (column-major).
    pub fn real_coords(&self) -> Vec<f64> {
        match self.field {
            Field::Real => self.data.iter().map(|z| z.re).collect(),
            Field::Complex => self.data.iter().flat_map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn determinant(&self) -> C64 {
        self.data.determinant()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        Mat::from_parts(self.field.join(rhs.field), &self.data + &rhs.data)
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        Mat::from_parts(self.field.join(rhs.field), &self.data - &rhs.data)
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        Mat::from_parts(self.field.join(rhs.field), &self.data * &rhs.data)
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        Mat::from_parts(self.field, -&self.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_rejects_imaginary_entries() {
        let d = DMatrix::from_element(2, 2, C64::new(1.0, 1e-300));
        assert!(matches!(Mat::new(Field::Real, d), Err(Error::FieldError(_))));
    }

    #[test]
    fn rejects_nan_and_non_square() {
        assert_eq!(
            Mat::from_real(2, &[1.0, f64::NAN, 0.0, 1.0]),
            Err(Error::NonFinite)
        );
        let d = DMatrix::from_element(2, 3, C64::new(1.0, 0.0));
        assert!(matches!(Mat::new(Field::Complex, d), Err(Error::ShapeError(_))));
    }

    #[test]
    fn small_imaginary_parts_keep_complex_field() {
        let m = Mat::from_complex(1, &[C64::new(1.0, 1e-20)]).unwrap();
        assert_eq!(m.field(), Field::Complex);
        let r = Mat::identity(Field::Real, 2).scale(C64::new(0.0, 1.0));
        assert_eq!(r.field(), Field::Complex);
    }

    #[test]
    fn vec_is_column_major() {
        let m = Mat::from_real(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let v = m.vec_col_major();
        let got: Vec<f64> = v.iter().map(|z| z.re).collect();
        assert_eq!(got, vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(Mat::from_vec_col_major(Field::Real, 2, &v), m);
    }

    #[test]
    fn direct_sum_and_blocks() {
        let a = Mat::diag(Field::Real, &[1.0, 2.0]);
        let b = Mat::diag(Field::Real, &[3.0]);
        let s = Mat::direct_sum(&a, &b);
        assert_eq!(s, Mat::diag(Field::Real, &[1.0, 2.0, 3.0]));
        assert_eq!(s.principal_block(2, 1), b);
        assert_eq!(s.principal_block(0, 2), a);
    }
}
