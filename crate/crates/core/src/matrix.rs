//! Dense complex matrices.
//!
//! [`ComplexMatrix`] is an immutable value: every operation returns a fresh
//! matrix. Shape errors in the arithmetic operators panic (like `nalgebra`,
//! which backs the storage); the `checked_*` variants return an [`Error`]
//! instead and are what the public theorem operations use.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};

/// Dense `rows x cols` matrix of complex scalars.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

/// Shorthand for a real complex number.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, validating the count and
    /// rejecting NaN or infinite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                found: entries.len(),
            });
        }
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: k / cols.max(1),
                    col: k % cols.max(1),
                });
            }
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    /// Builds a real matrix from row slices. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(
            rows.iter().all(|r| r.len() == ncols),
            "ragged rows passed to from_real_rows"
        );
        Self::from_fn(nrows, ncols, |i, j| re(rows[i][j]))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            inner: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().copied().map(re).collect();
        Self::from_diagonal(&d)
    }

    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Self {
        Self { inner }
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DMatrix<Complex64> {
        self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let (m, n) = self.shape();
        let mut out = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.inner
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.map(|z| z * s),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            inner: self.inner.map(|z| z * s),
        }
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian_part of a non-square matrix");
        Self {
            inner: (&self.inner + self.inner.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `self - other`. Panics on shape mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(
            self.shape(),
            other.shape(),
            "distance between mismatched shapes"
        );
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(mismatch("multiply", self, rhs));
        }
        Ok(Self {
            inner: &self.inner * &rhs.inner,
        })
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(mismatch("add", self, rhs));
        }
        Ok(Self {
            inner: &self.inner + &rhs.inner,
        })
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(mismatch("subtract", self, rhs));
        }
        Ok(Self {
            inner: &self.inner - &rhs.inner,
        })
    }

    /// Copy of the `nrows x ncols` block starting at `(row, col)`.
    pub fn block(&self, row: usize, col: usize, nrows: usize, ncols: usize) -> Self {
        assert!(row + nrows <= self.rows() && col + ncols <= self.cols());
        Self::from_fn(nrows, ncols, |i, j| self.inner[(row + i, col + j)])
    }

    /// Assembles `[[a, b], [c, d]]`. Panics if the blocks do not tile.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert!(
            a.rows() == b.rows()
                && c.rows() == d.rows()
                && a.cols() == c.cols()
                && b.cols() == d.cols(),
            "blocks do not tile: {:?} {:?} / {:?} {:?}",
            a.shape(),
            b.shape(),
            c.shape(),
            d.shape()
        );
        let (m1, n1) = a.shape();
        let (m, n) = (m1 + c.rows(), n1 + b.cols());
        Self::from_fn(m, n, |i, j| match (i < m1, j < n1) {
            (true, true) => a.inner[(i, j)],
            (true, false) => b.inner[(i, j - n1)],
            (false, true) => c.inner[(i - m1, j)],
            (false, false) => d.inner[(i - m1, j - n1)],
        })
    }

    /// `diag(a, b)` as a block matrix.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        Self::from_blocks(
            a,
            &Self::zeros(a.rows(), b.cols()),
            &Self::zeros(b.rows(), a.cols()),
            b,
        )
    }

    /// Stacks `top` above `bottom`.
    pub fn vstack(top: &Self, bottom: &Self) -> Self {
        assert_eq!(top.cols(), bottom.cols(), "vstack of mismatched widths");
        let m1 = top.rows();
        Self::from_fn(m1 + bottom.rows(), top.cols(), |i, j| {
            if i < m1 {
                top.inner[(i, j)]
            } else {
                bottom.inner[(i - m1, j)]
            }
        })
    }
}

fn mismatch(op: &'static str, a: &ComplexMatrix, b: &ComplexMatrix) -> Error {
    Error::DimensionMismatch {
        op,
        left: format!("{}x{}", a.rows(), a.cols()),
        right: format!("{}x{}", b.rows(), b.cols()),
    }
}

/// `AB - BA` for square matrices of equal size.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "commutator",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.shape() != b.shape() {
        return Err(mismatch("commutator", a, b));
    }
    Ok(a * b - b * a)
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.inner[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Serialized as `{"rows": m, "cols": n, "entries": [[re, im], ...]}`,
/// row-major.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<[f64; 2]> = self.row_major().into_iter().map(|z| [z.re, z.im]).collect();
        let mut st = serializer.serialize_struct("ComplexMatrix", 3)?;
        st.serialize_field("rows", &self.rows())?;
        st.serialize_field("cols", &self.cols())?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                match self.$checked(rhs) {
                    Ok(m) => m,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                (&self).$method(rhs)
            }
        }
        impl $trait<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Mul, mul, checked_mul);
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix {
            inner: -&self.inner,
        }
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_validates_entries() {
        assert!(ComplexMatrix::new(2, 2, vec![re(1.0); 3]).is_err());
        let bad = vec![re(1.0), re(f64::NAN), re(0.0), re(0.0)];
        match ComplexMatrix::new(2, 2, bad) {
            Err(Error::NonFinite { row: 0, col: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let m = ComplexMatrix::new(2, 3, (0..6).map(|k| re(k as f64)).collect()).unwrap();
        assert_eq!(m.get(1, 0), re(3.0));
        assert_eq!(m.row_major()[4], re(4.0));
    }

    #[test]
    fn adjoint_conjugates() {
        let m = ComplexMatrix::new(
            1,
            2,
            vec![Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)],
        )
        .unwrap();
        let a = m.adjoint();
        assert_eq!(a.shape(), (2, 1));
        assert_eq!(a.get(0, 0), Complex64::new(1.0, -2.0));
        assert_eq!(a.get(1, 0), Complex64::new(0.0, 1.0));
    }

    #[test]
    fn blocks_round_trip() {
        let m = ComplexMatrix::from_fn(4, 5, |i, j| re((i * 5 + j) as f64));
        let a = m.block(0, 0, 1, 2);
        let b = m.block(0, 2, 1, 3);
        let c = m.block(1, 0, 3, 2);
        let d = m.block(1, 2, 3, 3);
        assert_eq!(ComplexMatrix::from_blocks(&a, &b, &c, &d), m);
        let empty = ComplexMatrix::zeros(0, 3);
        let v = ComplexMatrix::vstack(&empty, &m.block(0, 0, 2, 3));
        assert_eq!(v.shape(), (2, 3));
    }

    #[test]
    fn commutator_checks_shapes() {
        let i = ComplexMatrix::identity(3);
        let b = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64, j as f64));
        assert_eq!(commutator(&i, &b).unwrap().frobenius_norm(), 0.0);
        assert!(commutator(&i, &ComplexMatrix::identity(2)).is_err());
        assert!(commutator(&ComplexMatrix::zeros(2, 3), &ComplexMatrix::zeros(2, 3)).is_err());
        let ab = commutator(&b, &b.adjoint()).unwrap();
        let ba = commutator(&b.adjoint(), &b).unwrap();
        assert_eq!(ab, -ba);
    }

    #[test]
    fn checked_ops_report_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(a.checked_mul(&a).is_err());
        assert!(a.checked_add(&ComplexMatrix::zeros(3, 2)).is_err());
        assert!(a.checked_mul(&a.adjoint()).is_ok());
    }
}
