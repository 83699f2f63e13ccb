//! Dense linear-algebra and transform kernels.

mod eig;
mod rng;
mod svd;
mod transform;

pub use eig::{sym_eig, EigResult};
pub use rng::RngState;
pub use svd::{thin_svd, SvdResult};
pub use transform::{dft, fwht};

use crate::error::{Error, Result};
use crate::real::{cst, Real};

/// Dense matrix with entries stored in row-major order.
///
/// Constructors reject non-finite entries; operations never emit NaN silently.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Real> Matrix<T> {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                len: entries.len(),
            });
        }
        if let Some(index) = entries.iter().position(|e| !e.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Internal constructor for results of operations that cannot produce
    /// non-finite values from finite inputs.
    pub(crate) fn from_raw(rows: usize, cols: usize, entries: Vec<T>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![T::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// Builds a matrix from a row-major nested slice. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend_from_slice(row);
        }
        Self::new(r, c, entries)
    }

    /// Single-column matrix from a vector.
    pub fn column_vector(v: &[T]) -> Result<Self> {
        Self::new(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        debug_assert!(row < self.rows && col < self.cols);
        self.entries[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.rows && col < self.cols);
        self.entries[row * self.cols + col] = value;
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[T] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn col(&self, col: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.entries[lhs_row + j] += a * rhs.entries[rhs_row + j];
                }
            }
        }
        out
    }

    /// Matrix-vector product `self * x`.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "vector length must match columns");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Product `self^T * x` without forming the transpose.
    pub fn transpose_matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.rows, x.len(), "vector length must match rows");
        let mut out = vec![T::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == T::zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.get(i, j) * xi;
            }
        }
        out
    }

    pub fn scale(&self, factor: T) -> Self {
        Self::from_raw(
            self.rows,
            self.cols,
            self.entries.iter().map(|&e| e * factor).collect(),
        )
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_raw(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_raw(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        )
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries.iter().map(|&e| e * e).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, e| acc.max(e.abs()))
    }

    /// Keeps the first `k` columns.
    pub fn take_cols(&self, k: usize) -> Self {
        assert!(k <= self.cols);
        let mut out = Self::zeros(self.rows, k);
        for r in 0..self.rows {
            for c in 0..k {
                out.set(r, c, self.get(r, c));
            }
        }
        out
    }

    /// Deviation of `self^T * self` from the identity, in max-abs norm.
    pub fn orthonormality_defect(&self) -> T {
        let gram = self.transpose().matmul(self);
        let mut worst = T::zero();
        for i in 0..gram.rows {
            for j in 0..gram.cols {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((gram.get(i, j) - target).abs());
            }
        }
        worst
    }
}

/// Euclidean norm of a slice.
pub fn vec_norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|&e| e * e).sum::<T>().sqrt()
}

/// Dot product of two slices.
pub fn vec_dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Orthonormal basis for the column span of `m`.
///
/// Columns are normalized, then passed through Gram-Schmidt with a second
/// re-orthogonalization pass so nearly dependent columns stay stable. A column
/// whose residual drops below 1e-10 of its (unit) scale marks the input as
/// rank deficient.
pub fn orthonormalize<T: Real>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let (rows, cols) = (m.rows(), m.cols());
    if cols == 0 || cols > rows {
        return Err(Error::RankDeficient {
            rank: rows.min(cols),
            cols,
        });
    }
    let rank_tol: T = cst(1e-10);
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = m.col(j);
        let norm = vec_norm(&v);
        if norm <= T::zero() {
            return Err(Error::RankDeficient {
                rank: basis.len(),
                cols,
            });
        }
        for e in v.iter_mut() {
            *e /= norm;
        }
        // Two orthogonalization passes ("twice is enough").
        for _ in 0..2 {
            for q in &basis {
                let coeff = vec_dot(q, &v);
                for (ve, &qe) in v.iter_mut().zip(q) {
                    *ve -= coeff * qe;
                }
            }
        }
        let resid = vec_norm(&v);
        if resid <= rank_tol {
            return Err(Error::RankDeficient {
                rank: basis.len(),
                cols,
            });
        }
        for e in v.iter_mut() {
            *e /= resid;
        }
        basis.push(v);
    }
    let mut out = Matrix::zeros(rows, cols);
    for (j, q) in basis.iter().enumerate() {
        for (i, &e) in q.iter().enumerate() {
            out.set(i, j, e);
        }
    }
    Ok(out)
}
