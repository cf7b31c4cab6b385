//! Dense complex matrices.
//!
//! A small row-major matrix type with exactly the operations the estimators
//! need: products, conjugate transposition, Cholesky solves against Hermitian
//! positive definite systems, closed-form 2x2 determinant and inverse, and
//! block assembly for augmented (widely linear) quantities.
//!
//! Arithmetic operators panic on shape mismatch, like most dense matrix
//! libraries; the fallible entry points (`solve_hpd`, `det2`, `inv2`,
//! `block2x2`) return [`Error`] instead.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, Real};

/// Complex column vector.
pub type CVector<T> = Vec<Complex<T>>;

/// Dense complex matrix, row-major: `data[i * cols + j] = A[i, j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile", bound = "T: Real")]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

/// On-disk JSON layout of a complex matrix:
/// `{"rows": r, "cols": c, "re": [...], "im": [...]}` with row-major parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl<T: Real> From<Matrix<T>> for MatrixFile {
    fn from(m: Matrix<T>) -> Self {
        MatrixFile {
            rows: m.rows,
            cols: m.cols,
            re: m.data.iter().map(|z| z.re.as_f64()).collect(),
            im: m.data.iter().map(|z| z.im.as_f64()).collect(),
        }
    }
}

impl<T: Real> TryFrom<MatrixFile> for Matrix<T> {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Self> {
        let len = f.rows * f.cols;
        if f.re.len() != len || f.im.len() != len {
            return Err(Error::dims(
                "matrix file",
                format!("{len} real and imaginary parts"),
                format!("{} real, {} imaginary", f.re.len(), f.im.len()),
            ));
        }
        let data: Vec<Complex<T>> =
            f.re.iter()
                .zip(&f.im)
                .map(|(&re, &im)| Complex::new(T::lit(re), T::lit(im)))
                .collect();
        if !data.iter().all(|&z| is_finite(z)) {
            return Err(Error::BadSpec("matrix file contains non-finite entries".into()));
        }
        Ok(Matrix {
            rows: f.rows,
            cols: f.cols,
            data,
        })
    }
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    /// `scale · I_n`.
    pub fn scaled_identity(n: usize, scale: Complex<T>) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = scale;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(
                "from_row_major",
                format!("{} entries", rows * cols),
                format!("{} entries", data.len()),
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[&[Complex<T>]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    /// Column vector as an `n x 1` matrix.
    pub fn column_vector(v: &[Complex<T>]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> CVector<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> CVector<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Element-wise complex conjugate.
    pub fn conj(&self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex<T>]) -> CVector<T> {
        assert_eq!(
            self.cols,
            v.len(),
            "mul_vec: {}x{} times {}",
            self.rows,
            self.cols,
            v.len()
        );
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Product with shape check.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::dims(
                "matrix product",
                format!("{} rows on the right", self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|&z| is_finite(z))
    }

    /// Hermitian within `tol` relative to `max(1, ‖A‖_F)`.
    pub fn is_hermitian(&self, tol: T) -> bool {
        if !self.is_square() {
            return false;
        }
        let bound = tol * T::one().max(self.frobenius_norm());
        (0..self.rows).all(|i| (i..self.cols).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= bound))
    }

    /// `(A + Aᴴ) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian_part of non-square matrix");
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()).scale(half)
        })
    }

    /// Copy of the matrix restricted to the given rows.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Copy of the matrix restricted to the given columns.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    /// The matrix with column `j` deleted.
    pub fn remove_column(&self, j: usize) -> Self {
        let keep: Vec<usize> = (0..self.cols).filter(|&c| c != j).collect();
        self.select_columns(&keep)
    }

    /// The matrix with row and column `j` deleted.
    pub fn remove_row_column(&self, j: usize) -> Self {
        let keep_r: Vec<usize> = (0..self.rows).filter(|&r| r != j).collect();
        let keep_c: Vec<usize> = (0..self.cols).filter(|&c| c != j).collect();
        self.select_rows(&keep_r).select_columns(&keep_c)
    }

    /// Inserts `col` as column `j`, shifting later columns right.
    pub fn insert_column(&self, j: usize, col: &[Complex<T>]) -> Self {
        assert_eq!(col.len(), self.rows, "insert_column: length mismatch");
        assert!(j <= self.cols, "insert_column: position out of range");
        Self::from_fn(self.rows, self.cols + 1, |r, c| match c.cmp(&j) {
            std::cmp::Ordering::Less => self[(r, c)],
            std::cmp::Ordering::Equal => col[r],
            std::cmp::Ordering::Greater => self[(r, c - 1)],
        })
    }

    /// Swaps the row halves and the column halves: `Π·A·Π` with `Π` the
    /// block-swap permutation `[[0, I], [I, 0]]`.
    ///
    /// Every augmented matrix `M` satisfies `M.block_swap() == M.conj()`.
    pub fn block_swap(&self) -> Self {
        assert!(
            self.rows.is_multiple_of(2) && self.cols.is_multiple_of(2),
            "block_swap needs even dimensions, got {}x{}",
            self.rows,
            self.cols
        );
        let (hr, hc) = (self.rows / 2, self.cols / 2);
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[((i + hr) % self.rows, (j + hc) % self.cols)]
        })
    }

    /// Largest element-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff: shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        match self.try_mul(rhs) {
            Ok(m) => m,
            Err(e) => panic!("{e}"),
        }
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum: shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference: shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// Conjugate transpose of `a`.
pub fn hermitian<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    a.hermitian()
}

/// Cholesky factor `L` (lower triangular) of a Hermitian positive definite
/// matrix, `A = L·Lᴴ`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Factors `a`. Only the lower triangle is read after the Hermitian check.
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dims(
                "cholesky",
                "square matrix",
                format!("{}x{}", a.rows, a.cols),
            ));
        }
        if !a.is_hermitian(T::tol(1e-10)) {
            return Err(Error::NotHpd { pivot: 0 });
        }
        let n = a.rows;
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::NotHpd { pivot: j });
            }
            let ljj = d.sqrt();
            l[(j, j)] = Complex::new(ljj, T::zero());
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn factor(&self) -> &Matrix<T> {
        &self.l
    }

    /// `ln det A = 2 Σ ln L_jj`.
    pub fn log_det(&self) -> T {
        (0..self.l.rows).map(|j| self.l[(j, j)].re.ln()).sum::<T>() * T::lit(2.0)
    }

    /// Solves `A·x = b` in place.
    pub fn solve_vec_in_place(&self, b: &mut [Complex<T>]) {
        let n = self.l.rows;
        assert_eq!(b.len(), n, "cholesky solve: length mismatch");
        // L z = b
        for i in 0..n {
            let row = self.l.row(i);
            let s = b[i] - (0..i).map(|k| row[k] * b[k]).sum::<Complex<T>>();
            b[i] = s / row[i].re;
        }
        // Lᴴ x = z
        for i in (0..n).rev() {
            let s = b[i] - (i + 1..n).map(|k| self.l[(k, i)].conj() * b[k]).sum::<Complex<T>>();
            b[i] = s / self.l[(i, i)].re;
        }
    }

    /// Solves `A·X = B`.
    pub fn solve(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        if b.rows != self.l.rows {
            return Err(Error::dims(
                "solve_hpd",
                format!("{} rows", self.l.rows),
                format!("{}x{}", b.rows, b.cols),
            ));
        }
        let mut x = Matrix::zeros(b.rows, b.cols);
        let mut col = vec![Complex::zero(); b.rows];
        for j in 0..b.cols {
            for (i, c) in col.iter_mut().enumerate() {
                *c = b[(i, j)];
            }
            self.solve_vec_in_place(&mut col);
            for (i, &c) in col.iter().enumerate() {
                x[(i, j)] = c;
            }
        }
        Ok(x)
    }
}

/// Solves `A·X = B` for Hermitian positive definite `A`.
pub fn solve_hpd<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    Cholesky::new(a)?.solve(b)
}

fn check_2x2<T: Real>(a: &Matrix<T>, op: &'static str) -> Result<()> {
    if a.shape() != (2, 2) {
        return Err(Error::dims(op, "2x2", format!("{}x{}", a.rows, a.cols)));
    }
    Ok(())
}

/// Determinant of a 2x2 matrix, `ad - bc`.
pub fn det2<T: Real>(a: &Matrix<T>) -> Result<Complex<T>> {
    check_2x2(a, "det2")?;
    Ok(a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)])
}

/// Singularity threshold used by [`inv2`]: `1e-12 · max(1, ‖A‖_F)`.
pub fn singular_threshold<T: Real>(a: &Matrix<T>) -> T {
    T::tol(1e-12) * T::one().max(a.frobenius_norm())
}

/// Closed-form inverse of a 2x2 matrix.
pub fn inv2<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let det = det2(a)?;
    if det.norm() <= singular_threshold(a) {
        return Err(Error::Singular {
            det: det.norm().as_f64(),
        });
    }
    let inv_det = det.inv();
    Ok(Matrix::from_rows(&[
        &[a[(1, 1)] * inv_det, -a[(0, 1)] * inv_det],
        &[-a[(1, 0)] * inv_det, a[(0, 0)] * inv_det],
    ]))
}

/// Assembles `[[A, B], [C, D]]`.
pub fn block2x2<T: Real>(a: &Matrix<T>, b: &Matrix<T>, c: &Matrix<T>, d: &Matrix<T>) -> Result<Matrix<T>> {
    if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
        return Err(Error::dims(
            "block2x2",
            "conformable blocks",
            format!(
                "A {}x{}, B {}x{}, C {}x{}, D {}x{}",
                a.rows, a.cols, b.rows, b.cols, c.rows, c.cols, d.rows, d.cols
            ),
        ));
    }
    let rows = a.rows + c.rows;
    let cols = a.cols + b.cols;
    Ok(Matrix::from_fn(rows, cols, |i, j| match (i < a.rows, j < a.cols) {
        (true, true) => a[(i, j)],
        (true, false) => b[(i, j - a.cols)],
        (false, true) => c[(i - a.rows, j)],
        (false, false) => d[(i - a.rows, j - a.cols)],
    }))
}

/// Block diagonal `[[A, 0], [0, B]]`.
pub fn blkdiag<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    block2x2(a, &Matrix::zeros(a.rows, b.cols), &Matrix::zeros(b.rows, a.cols), b)
        .expect("block diagonal blocks are always conformable")
}

/// Augmented (widely linear) form `[[E, F], [F*, E*]]`.
pub fn augmented<T: Real>(e: &Matrix<T>, f: &Matrix<T>) -> Result<Matrix<T>> {
    block2x2(e, f, &f.conj(), &e.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type M = Matrix<f64>;

    fn i() -> Complex<f64> {
        Complex::new(0.0, 1.0)
    }

    #[test]
    fn hermitian_examples() {
        let a = M::from_rows(&[&[c(1.0, 2.0)]]);
        assert_eq!(hermitian(&a), M::from_rows(&[&[c(1.0, -2.0)]]));
        assert_eq!(hermitian(&M::identity(3)), M::identity(3));
        let n = M::from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0)]]);
        let nt = M::from_rows(&[&[c(0.0, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]]);
        assert_eq!(hermitian(&n), nt);
    }

    #[test]
    fn solve_identity_and_scaled() {
        let b = M::from_rows(&[&[c(1.0, 2.0), c(-3.0, 0.5)], &[c(0.0, -1.0), c(4.0, 4.0)]]);
        let x = solve_hpd(&M::identity(2), &b).unwrap();
        assert!(x.max_abs_diff(&b) < 1e-15);

        let x = solve_hpd(&M::identity(2).scale_real(2.0), &M::identity(2)).unwrap();
        assert!(x.max_abs_diff(&M::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn solve_hermitian_2x2() {
        let a = M::from_rows(&[&[c(2.0, 0.0), i()], &[-i(), c(2.0, 0.0)]]);
        let x = solve_hpd(&a, &M::identity(2)).unwrap();
        let expected = M::from_rows(&[&[c(2.0, 0.0), -i()], &[i(), c(2.0, 0.0)]]).scale_real(1.0 / 3.0);
        assert!(x.max_abs_diff(&expected) < 1e-14);
        // multiply back
        assert!((&a * &x).max_abs_diff(&M::identity(2)) < 1e-14);
    }

    #[test]
    fn solve_rejects_indefinite_and_singular() {
        let a = M::from_rows(&[&[c(1.0, 0.0), c(2.0, 0.0)], &[c(2.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(
            solve_hpd(&a, &M::identity(2)),
            Err(Error::NotHpd { pivot: 1 })
        ));
        let z = M::zeros(3, 3);
        assert!(matches!(
            solve_hpd(&z, &M::identity(3)),
            Err(Error::NotHpd { pivot: 0 })
        ));
        let skew = M::from_rows(&[&[c(2.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(2.0, 0.0)]]);
        assert!(solve_hpd(&skew, &M::identity(2)).is_err());
        assert!(matches!(
            solve_hpd(&M::identity(2), &M::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn det2_examples() {
        assert_eq!(det2(&M::identity(2)).unwrap(), c(1.0, 0.0));
        let d = M::from_diagonal(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(det2(&d).unwrap(), c(6.0, 0.0));
        let a = M::from_rows(&[&[c(1.0, 0.0), i()], &[i(), c(1.0, 0.0)]]);
        assert_eq!(det2(&a).unwrap(), c(2.0, 0.0));
        assert!(matches!(det2(&M::identity(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn inv2_examples() {
        assert_eq!(inv2(&M::identity(2)).unwrap(), M::identity(2));
        let d = M::from_diagonal(&[c(2.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(inv2(&d).unwrap(), M::from_diagonal(&[c(0.5, 0.0), c(0.25, 0.0)]));
        let a = M::from_rows(&[&[c(1.0, 0.0), i()], &[i(), c(1.0, 0.0)]]);
        let inv = inv2(&a).unwrap();
        let expected = M::from_rows(&[&[c(1.0, 0.0), -i()], &[-i(), c(1.0, 0.0)]]).scale_real(0.5);
        assert!(inv.max_abs_diff(&expected) < 1e-15);
        assert!((&a * &inv).max_abs_diff(&M::identity(2)) < 1e-12);
    }

    #[test]
    fn inv2_flags_singular() {
        let a = M::from_rows(&[&[c(1.0, 0.0), c(2.0, 0.0)], &[c(2.0, 0.0), c(4.0, 0.0)]]);
        assert!(matches!(inv2(&a), Err(Error::Singular { .. })));
        // tiny but well-conditioned matrices are not singular
        let small = M::identity(2).scale_real(1e-5);
        assert!(inv2(&small).is_ok());
    }

    #[test]
    fn block_assembly() {
        let one = M::from_rows(&[&[c(1.0, 0.0)]]);
        let b = block2x2(&one, &one, &one, &one).unwrap();
        assert_eq!(b, M::from_fn(2, 2, |_, _| c(1.0, 0.0)));

        let h = M::from_rows(&[&[i()]]);
        let bd = blkdiag(&h, &h.conj());
        assert_eq!(bd, M::from_rows(&[&[i(), c(0.0, 0.0)], &[c(0.0, 0.0), -i()]]));

        let e = M::from_rows(&[&[c(1.0, 1.0), c(2.0, 0.0)]]);
        let f = M::from_rows(&[&[c(0.0, 3.0), c(-1.0, 0.5)]]);
        let aug = augmented(&e, &f).unwrap();
        assert_eq!(aug.shape(), (2, 4));
        assert_eq!(aug[(1, 0)], f[(0, 0)].conj());
        assert_eq!(aug[(1, 3)], e[(0, 1)].conj());

        assert!(matches!(
            block2x2(&one, &M::identity(2), &one, &one),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn column_edits_roundtrip() {
        let a = M::from_fn(3, 4, |i, j| c(i as f64, j as f64));
        for j in 0..4 {
            let back = a.remove_column(j).insert_column(j, &a.column(j));
            assert_eq!(back, a);
        }
        assert_eq!(a.remove_row_column(1).shape(), (2, 3));
    }

    #[test]
    fn matrix_file_rejects_bad_lengths() {
        let f = MatrixFile {
            rows: 2,
            cols: 2,
            re: vec![0.0; 4],
            im: vec![0.0; 3],
        };
        assert!(Matrix::<f64>::try_from(f).is_err());
        let json = r#"{"rows":1,"cols":2,"re":[1.0,2.0],"im":[0.5,-0.5]}"#;
        let m: M = serde_json::from_str(json).unwrap();
        assert_eq!(m[(0, 1)], c(2.0, -0.5));
        assert_eq!(serde_json::to_string(&m).unwrap(), json);
    }

    #[test]
    fn works_in_single_precision() {
        let a = Matrix::<f32>::from_rows(&[&[c(2.0, 0.0), c(0.0, 1.0)], &[c(0.0, -1.0), c(2.0, 0.0)]]);
        let x = solve_hpd(&a, &Matrix::identity(2)).unwrap();
        assert!((&a * &x).max_abs_diff(&Matrix::identity(2)) < 1e-6);
    }
}
