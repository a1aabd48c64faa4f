use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense real-symmetric matrix, row-major.
///
/// Symmetry is exact: every constructor either produces a symmetric array by
/// construction or averages the input with its transpose after checking that
/// the asymmetry is within `T::SYMMETRY_TOL` of the Frobenius norm.
#[derive(Clone, PartialEq)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

/// General dense matrix, row-major. Used for intermediate products and
/// non-symmetric factors (eigenbases, congruence transforms, compressions).
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    /// Builds from a row-major array, symmetrizing small asymmetry.
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be at least 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::Shape(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Shape("non-finite entry".into()));
        }
        let norm = data.iter().map(|&x| x * x).sum::<T>().sqrt();
        let mut asym = T::zero();
        for i in 0..dim {
            for j in (i + 1)..dim {
                asym = asym.max((data[i * dim + j] - data[j * dim + i]).abs());
            }
        }
        let allowed = T::lit(T::SYMMETRY_TOL) * norm;
        if asym > allowed {
            return Err(Error::Asymmetric {
                asymmetry: asym.as_f64(),
                allowed: allowed.as_f64(),
            });
        }
        Ok(Self::symmetrize_unchecked(dim, data))
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {dim}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Self::new(dim, data)
    }

    pub(crate) fn symmetrize_unchecked(dim: usize, mut data: Vec<T>) -> Self {
        let half = T::half();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let m = (data[i * dim + j] + data[j * dim + i]) * half;
                data[i * dim + j] = m;
                data[j * dim + i] = m;
            }
        }
        SymMatrix { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        SymMatrix {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, T::one())
    }

    pub fn scalar(dim: usize, c: T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c;
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        let n = diag.len();
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// `V diag(values) V^T` for a square `V`.
    pub fn from_spectrum(basis: &Matrix<T>, values: &[T]) -> Self {
        let n = basis.rows;
        debug_assert_eq!(basis.cols, values.len());
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let mut s = T::zero();
                for (k, &v) in values.iter().enumerate() {
                    s = s + basis.get(i, k) * v * basis.get(j, k);
                }
                data[i * n + j] = s;
                data[j * n + i] = s;
            }
        }
        SymMatrix { dim: n, data }
    }

    /// The `2n x 2n` block matrix `[[a, x], [x, b]]`.
    pub fn block2(a: &Self, x: &Self, b: &Self) -> Result<Self> {
        let n = a.dim;
        a.same_dim(x)?;
        a.same_dim(b)?;
        let m = 2 * n;
        let mut data = vec![T::zero(); m * m];
        for i in 0..n {
            for j in 0..n {
                data[i * m + j] = a.get(i, j);
                data[i * m + n + j] = x.get(i, j);
                data[(n + i) * m + j] = x.get(j, i);
                data[(n + i) * m + n + j] = b.get(i, j);
            }
        }
        Ok(SymMatrix { dim: m, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.dim)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        Matrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.clone(),
        }
    }

    /// Plain product `self * other`; generally not symmetric.
    pub fn matmul(&self, other: &Self) -> Matrix<T> {
        self.to_matrix().matmul(&other.to_matrix())
    }

    /// `self * x * self`, re-symmetrized.
    pub fn sandwich(&self, x: &Self) -> Self {
        let p = self.to_matrix();
        p.matmul(&x.to_matrix()).matmul(&p).symmetrized()
    }

    /// `c * self * c^T` for a (possibly rectangular) `c`.
    pub fn congruence(&self, c: &Matrix<T>) -> Self {
        assert_eq!(c.cols, self.dim, "dimension mismatch");
        c.matmul(&self.to_matrix()).matmul(&c.transpose()).symmetrized()
    }

    /// Entrywise `self + w * other`.
    pub fn add_scaled(&self, other: &Self, w: T) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + w * b).collect(),
        }
    }

    pub fn scale(&self, c: T) -> Self {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * c).collect(),
        }
    }

    /// Converts between scalar types.
    pub fn cast<U: Real>(&self) -> SymMatrix<U> {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| U::lit(x.as_f64())).collect(),
        }
    }
}

impl<'a, T: Real> Add<&'a SymMatrix<T>> for &'a SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn add(self, rhs: &'a SymMatrix<T>) -> SymMatrix<T> {
        self.add_scaled(rhs, T::one())
    }
}

impl<'a, T: Real> Sub<&'a SymMatrix<T>> for &'a SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn sub(self, rhs: &'a SymMatrix<T>) -> SymMatrix<T> {
        self.add_scaled(rhs, -T::one())
    }
}

impl<T: Real> Add for SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn add(self, rhs: SymMatrix<T>) -> SymMatrix<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn sub(self, rhs: SymMatrix<T>) -> SymMatrix<T> {
        &self - &rhs
    }
}

impl<T: Real> Mul<T> for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn mul(self, c: T) -> SymMatrix<T> {
        self.scale(c)
    }
}

impl<T: Real> Mul<T> for SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn mul(self, c: T) -> SymMatrix<T> {
        self.scale(c)
    }
}

impl<T: Real> Neg for SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn neg(self) -> SymMatrix<T> {
        self.scale(-T::one())
    }
}

impl<T: fmt::Debug> fmt::Debug for SymMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.dim)).finish()
    }
}

impl<T: Real> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.as_ref().len() != cols {
                return Err(Error::Shape("ragged rows".into()));
            }
            data.extend_from_slice(r.as_ref());
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] = out.data[i * other.cols + j] + a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Averages with the transpose. Panics if not square.
    pub fn symmetrized(&self) -> SymMatrix<T> {
        assert_eq!(self.rows, self.cols, "symmetrized needs a square matrix");
        SymMatrix::symmetrize_unchecked(self.rows, self.data.clone())
    }

    /// Largest entry of `|self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.data.len(), other.data.len(), "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.cols)).finish()
    }
}
