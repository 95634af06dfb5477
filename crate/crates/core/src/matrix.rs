//! Small dense matrices over f64, Complex64 or i64.
//!
//! Everything in this project is at most (3p-1) x (3p-1) with p <= 12, so a
//! plain row-major Vec with Gauss-Jordan inversion is all we need.

use num_complex::Complex64;
use num_traits::{One, Zero};
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Scalar types the matrix code works with.
pub trait Scalar:
    Copy
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + PartialEq
    + std::fmt::Debug
{
    /// Magnitude used for pivoting and residual norms.
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

impl Scalar for i64 {
    fn modulus(self) -> f64 {
        self.abs() as f64
    }
}

/// Field scalars additionally support division, which inversion needs.
pub trait FieldScalar: Scalar {
    fn recip(self) -> Self;
}

impl FieldScalar for f64 {
    fn recip(self) -> Self {
        1.0 / self
    }
}

impl FieldScalar for Complex64 {
    fn recip(self) -> Self {
        self.finv()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RMat = Mat<f64>;
pub type CMat = Mat<Complex64>;
pub type IMat = Mat<i64>;

impl<T: Scalar> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)] + other[(i, j)]
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)] - other[(i, j)]
        }))
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{what} {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "mul {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    pub fn map<U: Scalar>(&self, mut f: impl FnMut(T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::ShapeMismatch(format!(
                "mul_vec {}x{} with vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect())
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        (0..self.rows).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.modulus()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(0.0, |m, (a, b)| m.max((*a - *b).modulus()))
    }

    /// Maximum deviation from the identity matrix.
    pub fn identity_residual(&self) -> f64 {
        assert!(self.is_square());
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expect = if i == j { T::one() } else { T::zero() };
                m = m.max((self[(i, j)] - expect).modulus());
            }
        }
        m
    }

    /// Permute both rows and columns, with `perm[old] = new` (0-based):
    /// result(perm[i], perm[j]) = self(i, j).
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        assert_eq!(perm.len(), n);
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(perm[i], perm[j])] = self[(i, j)];
            }
        }
        out
    }

    /// Sub-block with rows r0..r0+nr and cols c0..c0+nc.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Direct sum of square blocks.
    pub fn block_diag(blocks: &[Mat<T>]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            assert!(b.is_square());
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(off + i, off + j)] = b[(i, j)];
                }
            }
            off += b.rows;
        }
        out
    }
}

impl<T: FieldScalar> Mat<T> {
    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, a[(r, col)].modulus()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if pivot_mag < 1e-300 {
                return Err(Error::Numerical(format!(
                    "singular matrix at pivot column {col}"
                )));
            }
            if pivot_row != col {
                for j in 0..n {
                    a.data.swap(pivot_row * n + j, col * n + j);
                    inv.data.swap(pivot_row * n + j, col * n + j);
                }
            }
            let piv_inv = a[(col, col)].recip();
            for j in 0..n {
                a[(col, j)] = a[(col, j)] * piv_inv;
                inv[(col, j)] = inv[(col, j)] * piv_inv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor == T::zero() {
                    continue;
                }
                for j in 0..n {
                    a[(r, j)] = a[(r, j)] - factor * a[(col, j)];
                    inv[(r, j)] = inv[(r, j)] - factor * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }
}

impl RMat {
    pub fn to_complex(&self) -> CMat {
        self.map(|x| Complex64::new(x, 0.0))
    }

    /// Round every entry to the nearest integer, returning the integer matrix
    /// and the largest rounding residual.
    pub fn round_to_integers(&self) -> (IMat, f64) {
        let mut residual: f64 = 0.0;
        let out = self.map(|x| {
            let r = x.round();
            residual = residual.max((x - r).abs());
            r as i64
        });
        (out, residual)
    }

    /// Coefficients of the characteristic polynomial
    /// `lambda^n + c[0] lambda^(n-1) + ... + c[n-1]`, via Newton's identities
    /// on the power sums tr(A^k). Fine for the tiny fixture matrices.
    pub fn char_poly(&self) -> Vec<f64> {
        assert!(self.is_square());
        let n = self.rows;
        let mut power = self.clone();
        let mut psums = Vec::with_capacity(n);
        for k in 0..n {
            psums.push(power.trace());
            if k + 1 < n {
                power = power.mul(self).unwrap();
            }
        }
        // e_k from Newton's identities; char poly coefficient is (-1)^k e_k.
        let mut e = vec![0.0f64; n + 1];
        e[0] = 1.0;
        for k in 1..=n {
            let mut acc = 0.0;
            for i in 1..=k {
                let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                acc += sign * e[k - i] * psums[i - 1];
            }
            e[k] = acc / k as f64;
        }
        (1..=n)
            .map(|k| if k % 2 == 1 { -e[k] } else { e[k] })
            .collect()
    }
}

impl IMat {
    pub fn to_real(&self) -> RMat {
        self.map(|x| x as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let a = RMat::from_rows(&[
            vec![2.0, 1.0, 0.5],
            vec![-1.0, 0.0, 0.5],
            vec![3.0, 2.0, -1.0],
        ]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).unwrap().identity_residual() < 1e-12);
        assert!(inv.mul(&a).unwrap().identity_residual() < 1e-12);
    }

    #[test]
    fn complex_inverse() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let a = CMat::from_rows(&[vec![one, i], vec![-i, one + i]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).unwrap().identity_residual() < 1e-12);
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = RMat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(a.inverse().is_err());
    }

    #[test]
    fn permute_symmetric_moves_entries() {
        let a = RMat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let p = a.permute_symmetric(&[1, 0]);
        assert_eq!(p[(0, 0)], 4.0);
        assert_eq!(p[(1, 1)], 1.0);
        assert_eq!(p[(0, 1)], 3.0);
    }

    #[test]
    fn char_poly_of_diag() {
        // diag(1, 1, -1): poly = (x-1)^2 (x+1) = x^3 - x^2 - x + 1.
        let a = RMat::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, -1.0],
        ]);
        let c = a.char_poly();
        let expect = [-1.0, -1.0, 1.0];
        for (got, want) in c.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn round_to_integers_reports_residual() {
        let a = RMat::from_rows(&[vec![1.9999999, -3.0000001]]);
        let (m, res) = a.round_to_integers();
        assert_eq!(m[(0, 0)], 2);
        assert_eq!(m[(0, 1)], -3);
        assert!(res < 2e-7 && res > 0.0);
    }
}
