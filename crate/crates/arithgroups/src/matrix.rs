//! Dense matrices over a generic scalar, with exact elimination
//! routines when the scalar is a field.

use crate::scalar::{Field, Scalar};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}x{1} incompatible with {2}x{3}")]
    DimMismatch(usize, usize, usize, usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
}

/// Row-major dense matrix.
///
/// Entries are stored by value; the type is an immutable value type in
/// practice (all operations return fresh matrices).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Elementary matrix: identity plus `k` in (0-based) position `(i, j)`.
    pub fn elementary(n: usize, i: usize, j: usize, k: T) -> Self {
        assert!(i != j && i < n && j < n, "elementary position out of range");
        let mut m = Self::identity(n);
        m[(i, j)] = k;
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zero(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
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

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Exact product. Errors on shape mismatch; no rounding ever occurs
    /// for exact scalars.
    pub fn matmul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add_mat(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        }))
    }

    pub fn sub_mat(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        }))
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() * c.clone()
        })
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    /// Upper triangular with unit diagonal.
    pub fn is_upper_unitriangular(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| self[(i, i)].is_one() && (0..i).all(|j| self[(i, j)].is_zero()))
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc += self[(i, j)].clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }
}

impl<T: Field> Matrix<T> {
    /// Exact inverse by Gauss–Jordan elimination.
    ///
    /// Pivot choice is the first nonzero entry in column order, so the
    /// computation is deterministic.
    pub fn inverse(&self) -> Result<Self, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !work[(r, col)].is_zero());
            let pivot = pivot.ok_or(MatrixError::Singular)?;
            if pivot != col {
                work.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = work[(col, col)].clone();
            let p_inv = p.field_inv();
            work.scale_row(col, &p_inv);
            inv.scale_row(col, &p_inv);
            for r in 0..n {
                if r != col && !work[(r, col)].is_zero() {
                    let factor = work[(r, col)].clone();
                    work.row_sub_scaled(r, col, &factor);
                    inv.row_sub_scaled(r, col, &factor);
                }
            }
        }
        Ok(inv)
    }

    /// Exact determinant by fraction-producing Gaussian elimination.
    pub fn det(&self) -> Result<T, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut work = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot = match (col..n).find(|&r| !work[(r, col)].is_zero()) {
                Some(p) => p,
                None => return Ok(T::zero()),
            };
            if pivot != col {
                work.swap_rows(pivot, col);
                det = -det;
            }
            let p = work[(col, col)].clone();
            det *= p.clone();
            let p_inv = p.field_inv();
            for r in col + 1..n {
                if !work[(r, col)].is_zero() {
                    let factor = work[(r, col)].clone() * p_inv.clone();
                    work.row_sub_scaled(r, col, &factor);
                }
            }
        }
        Ok(det)
    }

    /// Rank by exact row reduction.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let pivot = (rank..self.rows).find(|&r| !work[(r, col)].is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => continue,
            };
            work.swap_rows(pivot, rank);
            let p_inv = work[(rank, col)].clone().field_inv();
            for r in rank + 1..self.rows {
                if !work[(r, col)].is_zero() {
                    let factor = work[(r, col)].clone() * p_inv.clone();
                    work.row_sub_scaled(r, rank, &factor);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Dimension of the null space.
    pub fn kernel_dimension(&self) -> usize {
        self.cols - self.rank()
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn pow(&self, e: i64) -> Result<Self, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = Self::identity(self.rows);
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.matmul(&sq)?;
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.matmul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Group commutator `a b a^-1 b^-1`.
    pub fn commutator(&self, other: &Self) -> Result<Self, MatrixError> {
        let ai = self.inverse()?;
        let bi = other.inverse()?;
        self.matmul(other)?.matmul(&ai)?.matmul(&bi)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &T) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            let v = self.entries[idx].clone() * c.clone();
            self.entries[idx] = v;
        }
    }

    /// row r -= factor * row src
    fn row_sub_scaled(&mut self, r: usize, src: usize, factor: &T) {
        for j in 0..self.cols {
            let v = self.entries[src * self.cols + j].clone() * factor.clone();
            self.entries[r * self.cols + j] -= v;
        }
    }
}

/// Basis of a subspace, maintained in exact reduced row-echelon form so
/// membership and dimension queries are trivial. Used for span and
/// Krylov computations.
pub struct RowSpace<T> {
    cols: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Field> RowSpace<T> {
    pub fn new(cols: usize) -> Self {
        RowSpace {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the current basis; if a nonzero remainder is
    /// left, insert it and return true.
    pub fn insert(&mut self, mut v: Vec<T>) -> bool {
        assert_eq!(v.len(), self.cols);
        for row in &self.rows {
            let lead = row.iter().position(|x| !x.is_zero()).unwrap();
            if !v[lead].is_zero() {
                let factor = v[lead].clone() / row[lead].clone();
                for j in 0..self.cols {
                    let d = row[j].clone() * factor.clone();
                    v[j] -= d;
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(lead) => {
                let pivot_inv = v[lead].clone().field_inv();
                for x in v.iter_mut() {
                    *x *= pivot_inv.clone();
                }
                self.rows.push(v);
                self.rows
                    .sort_by_key(|r| r.iter().position(|x| !x.is_zero()));
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &[T]) -> bool {
        let mut v = v.to_vec();
        for row in &self.rows {
            let lead = row.iter().position(|x| !x.is_zero()).unwrap();
            if !v[lead].is_zero() {
                let factor = v[lead].clone() / row[lead].clone();
                for j in 0..self.cols {
                    let d = row[j].clone() * factor.clone();
                    v[j] -= d;
                }
            }
        }
        v.iter().all(|x| x.is_zero())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.entries[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.entries[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs).expect("shape mismatch in matrix product")
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.add_mat(rhs).expect("shape mismatch in matrix sum")
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.sub_mat(rhs)
            .expect("shape mismatch in matrix difference")
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.entries[i * self.cols + j].to_string())
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix({}x{})\n{}", self.rows, self.cols, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, RationalMatrix};
    use num_traits::{One, Zero};

    pub fn rat(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    pub fn qmat(rows: usize, cols: usize, ints: &[i64]) -> RationalMatrix {
        Matrix::new(rows, cols, ints.iter().map(|&v| rat(v, 1)).collect())
    }

    /// Independent reference product over i64, used as the base oracle
    /// for the exact multiply.
    fn naive_mul(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[i * n + j] += a[i * n + k] * b[k * n + j];
                }
            }
        }
        out
    }

    #[test]
    fn matmul_matches_naive_reference() {
        let a = [2, -1, 0, 3, 5, 7, 1, 1, -4];
        let b = [1, 0, 2, -3, 4, 1, 0, 6, -2];
        let expect = naive_mul(&a, &b, 3);
        let got = qmat(3, 3, &a).matmul(&qmat(3, 3, &b)).unwrap();
        assert_eq!(got, qmat(3, 3, &expect));
    }

    #[test]
    fn matmul_identity() {
        let m = qmat(3, 3, &[1, 2, 3, 0, 1, 4, 0, 0, 1]);
        let id = RationalMatrix::identity(3);
        assert_eq!(id.matmul(&m).unwrap(), m);
        assert_eq!(m.matmul(&id).unwrap(), m);
    }

    #[test]
    fn matmul_one_parameter_additivity() {
        // e_{1,2}^1 * e_{1,2}^1 = e_{1,2}^2
        let e1 = RationalMatrix::elementary(3, 0, 1, Rational::one());
        let e2 = RationalMatrix::elementary(3, 0, 1, rat(2, 1));
        assert_eq!(e1.matmul(&e1).unwrap(), e2);
    }

    #[test]
    fn matmul_shape_error() {
        let a = qmat(2, 3, &[1, 2, 3, 4, 5, 6]);
        let b = qmat(2, 2, &[1, 0, 0, 1]);
        assert!(matches!(a.matmul(&b), Err(MatrixError::DimMismatch(..))));
    }

    #[test]
    fn inverse_unipotent_and_diagonal() {
        let e = RationalMatrix::elementary(4, 0, 2, rat(5, 1));
        let expect = RationalMatrix::elementary(4, 0, 2, rat(-5, 1));
        assert_eq!(e.inverse().unwrap(), expect);

        let d = RationalMatrix::diagonal(&[rat(2, 1), rat(1, 2)]);
        let d_inv = RationalMatrix::diagonal(&[rat(1, 2), rat(2, 1)]);
        assert_eq!(d.inverse().unwrap(), d_inv);
        assert!(RationalMatrix::identity(3).inverse().unwrap().is_identity());
    }

    #[test]
    fn inverse_times_self_is_identity() {
        let m = qmat(3, 3, &[1, 1, 0, 1, 2, 1, 0, 1, 3]);
        let inv = m.inverse().unwrap();
        assert!(m.matmul(&inv).unwrap().is_identity());
        assert!(inv.matmul(&m).unwrap().is_identity());
    }

    #[test]
    fn singular_detected() {
        let m = qmat(2, 2, &[1, 2, 2, 4]);
        assert_eq!(m.inverse().unwrap_err(), MatrixError::Singular);
        assert_eq!(m.det().unwrap(), Rational::zero());
        assert_eq!(m.rank(), 1);
        assert_eq!(m.kernel_dimension(), 1);
    }

    #[test]
    fn det_values() {
        assert_eq!(qmat(2, 2, &[1, 1, 1, 2]).det().unwrap(), rat(1, 1));
        assert_eq!(qmat(2, 2, &[0, -1, 1, 0]).det().unwrap(), rat(1, 1));
        assert_eq!(
            qmat(3, 3, &[2, 0, 0, 0, 3, 0, 0, 0, 5]).det().unwrap(),
            rat(30, 1)
        );
    }

    #[test]
    fn negative_powers() {
        let e = RationalMatrix::elementary(3, 0, 1, rat(2, 1));
        let got = e.pow(-3).unwrap();
        assert_eq!(got, RationalMatrix::elementary(3, 0, 1, rat(-6, 1)));
        assert!(e.pow(0).unwrap().is_identity());
    }

    #[test]
    fn row_space_dims() {
        let mut s: RowSpace<Rational> = RowSpace::new(3);
        assert!(s.insert(vec![rat(1, 1), rat(0, 1), rat(1, 1)]));
        assert!(s.insert(vec![rat(0, 1), rat(2, 1), rat(0, 1)]));
        assert!(!s.insert(vec![rat(2, 1), rat(2, 1), rat(2, 1)]));
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[rat(3, 1), rat(-1, 1), rat(3, 1)]));
        assert!(!s.contains(&[rat(0, 1), rat(0, 1), rat(1, 1)]));
    }
}
