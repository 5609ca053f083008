//! Dense square complex matrices.
//!
//! [`OperatorMatrix`] is the single carrier type for Hamiltonians, involutions,
//! transformation operators and every derived operator in this crate. Storage is
//! a column-major `nalgebra` matrix; products go through `matrixmultiply`'s
//! complex GEMM kernel.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// A dense `dim x dim` complex matrix.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    inner: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self {
            inner: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self {
            inner: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Builds a matrix from `dim * dim` entries listed row by row.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyOperator);
        }
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                dim,
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let entries: Vec<Complex64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_row_major(dim, &entries)
    }

    pub fn from_dmatrix(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::NotSquare {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        if inner.nrows() == 0 {
            return Err(Error::EmptyOperator);
        }
        Ok(Self { inner })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.inner
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.inner[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: &self.inner * Complex64::new(s, 0.0),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            inner: &self.inner * s,
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Self {
        self.assert_same_dim(other);
        let mut out = self.clone();
        out.axpy(s, other);
        out
    }

    /// In-place `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        self.assert_same_dim(other);
        let s = Complex64::new(s, 0.0);
        for (a, b) in self.inner.iter_mut().zip(other.inner.iter()) {
            *a += s * b;
        }
    }

    pub fn add_identity(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim() {
            out.inner[(i, i)] += Complex64::new(s, 0.0);
        }
        out
    }

    /// Matrix product; errors on a dimension mismatch.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(self.gemm(other))
    }

    fn gemm(&self, other: &Self) -> Self {
        let n = self.dim();
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        let stride = n as isize;
        // SAFETY: all three buffers are contiguous column-major n x n arrays, and
        // Complex64 is repr(C) with the same layout as [f64; 2].
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                n,
                n,
                n,
                [1.0, 0.0],
                self.inner.as_ptr() as *const [f64; 2],
                1,
                stride,
                other.inner.as_ptr() as *const [f64; 2],
                1,
                stride,
                [0.0, 0.0],
                out.as_mut_ptr() as *mut [f64; 2],
                1,
                stride,
            );
        }
        Self { inner: out }
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim(), "vector length mismatch");
        let n = self.dim();
        let mut out = vec![ZERO; n];
        for j in 0..n {
            let vj = v[j];
            if vj == ZERO {
                continue;
            }
            let col = self.inner.column(j);
            for i in 0..n {
                out[i] += col[i] * vj;
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim(), other.dim());
        let mut out = DMatrix::<Complex64>::zeros(a * b, a * b);
        for i in 0..a {
            for j in 0..a {
                let s = self.inner[(i, j)];
                if s == ZERO {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out[(i * b + k, j * b + l)] = s * other.inner[(k, l)];
                    }
                }
            }
        }
        Self { inner: out }
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max|A − A†| / max|A|` (0 for the zero matrix).
    pub fn hermiticity_residual(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.inner[(i, j)] - self.inner[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let mut out = self.inner.clone();
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                let avg = 0.5 * (self.inner[(i, j)] + self.inner[(j, i)].conj());
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        Self { inner: out }
    }

    /// Square sub-block of size `size` starting at (`row`, `col`).
    pub fn block(&self, row: usize, col: usize, size: usize) -> Self {
        Self {
            inner: self.inner.view((row, col), (size, size)).into_owned(),
        }
    }

    /// Assembles a `2d x 2d` matrix from four `d x d` blocks.
    pub fn from_blocks(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Self {
        let d = tl.dim();
        for m in [tr, bl, br] {
            assert_eq!(m.dim(), d, "block dimension mismatch");
        }
        let mut out = DMatrix::<Complex64>::zeros(2 * d, 2 * d);
        out.view_mut((0, 0), (d, d)).copy_from(&tl.inner);
        out.view_mut((0, d), (d, d)).copy_from(&tr.inner);
        out.view_mut((d, 0), (d, d)).copy_from(&bl.inner);
        out.view_mut((d, d), (d, d)).copy_from(&br.inner);
        Self { inner: out }
    }

    fn assert_same_dim(&self, other: &Self) {
        assert_eq!(
            self.dim(),
            other.dim(),
            "operator dimension mismatch: {} vs {}",
            self.dim(),
            other.dim()
        );
    }
}

pub(crate) fn check_dims(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim() <= 8 {
            write!(f, "OperatorMatrix{}", self.inner)
        } else {
            write!(
                f,
                "OperatorMatrix {{ dim: {}, frobenius: {:e} }}",
                self.dim(),
                self.frobenius_norm()
            )
        }
    }
}

impl Index<(usize, usize)> for OperatorMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.inner[idx]
    }
}

impl IndexMut<(usize, usize)> for OperatorMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.inner[idx]
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.assert_same_dim(rhs);
        OperatorMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.assert_same_dim(rhs);
        OperatorMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        self.assert_same_dim(rhs);
        self.gemm(rhs)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn neg(self) -> OperatorMatrix {
        OperatorMatrix {
            inner: -&self.inner,
        }
    }
}

impl AddAssign<&OperatorMatrix> for OperatorMatrix {
    fn add_assign(&mut self, rhs: &OperatorMatrix) {
        self.assert_same_dim(rhs);
        self.inner += &rhs.inner;
    }
}

impl SubAssign<&OperatorMatrix> for OperatorMatrix {
    fn sub_assign(&mut self, rhs: &OperatorMatrix) {
        self.assert_same_dim(rhs);
        self.inner -= &rhs.inner;
    }
}

/// Pauli matrices σ₁, σ₂, σ₃.
pub fn pauli() -> [OperatorMatrix; 3] {
    let s1 = OperatorMatrix::from_row_major(2, &[ZERO, ONE, ONE, ZERO]).unwrap();
    let s2 = OperatorMatrix::from_row_major(2, &[ZERO, -I, I, ZERO]).unwrap();
    let s3 = OperatorMatrix::from_row_major(2, &[ONE, ZERO, ZERO, -ONE]).unwrap();
    [s1, s2, s3]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_mul(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
        let n = a.dim();
        OperatorMatrix::from_fn(n, |i, j| (0..n).map(|k| a[(i, k)] * b[(k, j)]).sum())
    }

    #[test]
    fn gemm_matches_naive_product() {
        let a = OperatorMatrix::from_fn(7, |i, j| Complex64::new((i * 3 + j) as f64, i as f64 - j as f64));
        let b = OperatorMatrix::from_fn(7, |i, j| Complex64::new((i + 2 * j) as f64 * 0.5, 1.0 / (1.0 + (i * j) as f64)));
        let diff = &(&a * &b) - &naive_mul(&a, &b);
        assert!(diff.max_abs() < 1e-12);
    }

    #[test]
    fn row_major_round_trip_and_entry_count() {
        let entries: Vec<Complex64> = (0..9).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let m = OperatorMatrix::from_row_major(3, &entries).unwrap();
        assert_eq!(m[(0, 2)], Complex64::new(2.0, 0.0));
        assert_eq!(m[(2, 0)], Complex64::new(6.0, 0.0));
        assert_eq!(m.to_row_major(), entries);
        assert!(matches!(
            OperatorMatrix::from_row_major(3, &entries[..8]),
            Err(Error::EntryCount { .. })
        ));
        assert!(matches!(OperatorMatrix::from_row_major(0, &[]), Err(Error::EmptyOperator)));
    }

    #[test]
    fn kron_of_paulis() {
        let [s1, _, s3] = pauli();
        let k = s3.kron(&s1);
        assert_eq!(k.dim(), 4);
        assert_eq!(k[(0, 1)], ONE);
        assert_eq!(k[(2, 3)], -ONE);
        assert_eq!(k[(0, 2)], ZERO);
    }

    #[test]
    fn try_mul_reports_mismatch() {
        let a = OperatorMatrix::identity(2);
        let b = OperatorMatrix::identity(3);
        assert!(matches!(
            a.try_mul(&b),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn hermitian_part_is_hermitian() {
        let a = OperatorMatrix::from_fn(5, |i, j| Complex64::new(i as f64, j as f64 * 2.0));
        assert!(a.hermiticity_residual() > 0.1);
        assert!(a.hermitian_part().hermiticity_residual() == 0.0);
    }
}
