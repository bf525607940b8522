//! Dense linear algebra over small complex matrices.
//!
//! Everything here is sized for the handful-of-qubits problems this crate
//! solves: matrices are stored row-major in a `Vec`, and dimensions above
//! [`MAX_DIM`] are rejected by the tensor product.

mod jacobi;
pub mod real;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

pub use jacobi::{herm_eig, Eigen};
pub use real::{cholesky, cholesky_solve, sym_eig, SymEigen, SymMatrix};

/// Largest dimension produced by [`kron`] unless a custom limit is given.
pub const MAX_DIM: usize = 64;

/// Deviation from Hermiticity tolerated by [`HermitianOperator::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixRecord", try_from = "MatrixRecord")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let mut m = Self::zeros(v.len(), w.len());
        for (i, vi) in v.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                m[(i, j)] = vi * wj.conj();
            }
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

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(C64, C64) -> C64) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn checked_add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).expect("matrix product dimensions")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.checked_add(rhs).expect("matrix sum dimensions")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.checked_sub(rhs).expect("matrix difference dimensions")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRecord {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<Matrix> for MatrixRecord {
    fn from(m: Matrix) -> Self {
        MatrixRecord {
            rows: m.rows,
            cols: m.cols,
            re: m.data.iter().map(|z| z.re).collect(),
            im: m.data.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<MatrixRecord> for Matrix {
    type Error = Error;
    fn try_from(r: MatrixRecord) -> Result<Self> {
        if r.re.len() != r.im.len() {
            return Err(Error::Dimension(format!(
                "{} real parts but {} imaginary parts",
                r.re.len(),
                r.im.len()
            )));
        }
        let data = r.re.iter().zip(&r.im).map(|(&a, &b)| C64::new(a, b)).collect();
        Matrix::new(r.rows, r.cols, data)
    }
}

/// Tensor product with the default dimension limit.
pub fn kron(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    kron_with_limit(a, b, MAX_DIM)
}

pub fn kron_with_limit(a: &Matrix, b: &Matrix, max_dim: usize) -> Result<Matrix> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    if rows.max(cols) > max_dim {
        return Err(Error::Size { dim: rows.max(cols), max: max_dim });
    }
    let mut out = Matrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Square complex matrix equal to its adjoint.
///
/// Construction averages `A` and `A†` after checking that they differ by at
/// most [`HERMITIAN_TOL`], so the stored matrix is exactly Hermitian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Matrix", try_from = "Matrix")]
pub struct HermitianOperator {
    matrix: Matrix,
}

impl HermitianOperator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "Hermitian operator from a {}x{} matrix",
                matrix.rows, matrix.cols
            )));
        }
        let adj = matrix.adjoint();
        let dev = (&matrix - &adj).max_abs();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Hermitian part `(A + A†)/2` of an arbitrary square matrix.
    pub fn symmetrized(matrix: Matrix) -> Self {
        assert!(matrix.is_square());
        let n = matrix.rows;
        let mut m = matrix;
        for i in 0..n {
            m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Self { matrix: m }
    }

    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_real(n, n, entries)?)
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: Matrix::identity(n) }
    }

    pub fn zero(n: usize) -> Self {
        Self { matrix: Matrix::zeros(n, n) }
    }

    /// Rank-1 projector `|v⟩⟨v|` for a unit vector `v`.
    pub fn projector(v: &[C64]) -> Self {
        Self::symmetrized(Matrix::outer(v, v))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { matrix: self.matrix.scale_real(k) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { matrix: self.matrix.checked_add(&other.matrix)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { matrix: self.matrix.checked_sub(&other.matrix)? })
    }

    /// `self + k·other`, in place.
    pub fn add_scaled(&mut self, k: f64, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("{} vs {}", self.dim(), other.dim())));
        }
        for (a, b) in self.matrix.data.iter_mut().zip(&other.matrix.data) {
            *a += b * k;
        }
        Ok(())
    }

    /// `U A U†`, re-symmetrized.
    pub fn conjugate_by(&self, u: &Matrix) -> Result<Self> {
        let m = u.checked_mul(&self.matrix)?.checked_mul(&u.adjoint())?;
        Ok(Self::symmetrized(m))
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Ok(Self::symmetrized(kron(&self.matrix, &other.matrix)?))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(herm_eig(self)?.values[0])
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*herm_eig(self)?.values.last().expect("nonempty spectrum"))
    }

    /// `⟨v|A|v⟩`, real for Hermitian `A`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let av = self.matrix.apply(v);
        v.iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

impl From<HermitianOperator> for Matrix {
    fn from(h: HermitianOperator) -> Matrix {
        h.matrix
    }
}

impl TryFrom<Matrix> for HermitianOperator {
    type Error = Error;
    fn try_from(m: Matrix) -> Result<Self> {
        HermitianOperator::new(m)
    }
}

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn is_psd(a: &HermitianOperator, tol: f64) -> bool {
    match herm_eig(a) {
        Ok(e) => e.values[0] >= -tol,
        Err(_) => false,
    }
}

/// `Re tr(A† B)`.
pub fn frob_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("{} vs {}", a.dim(), b.dim())));
    }
    Ok(a.matrix.data.iter().zip(&b.matrix.data).map(|(x, y)| (x.conj() * y).re).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    fn sigma_z() -> HermitianOperator {
        HermitianOperator::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    fn f0() -> HermitianOperator {
        sigma_z()
    }

    fn f1() -> HermitianOperator {
        let a = 1.0 - SQRT_2;
        HermitianOperator::from_real(2, &[a, 1.0, 1.0, a]).unwrap()
    }

    fn m0_published() -> HermitianOperator {
        HermitianOperator::from_real(2, &[0.84153, -0.15627, -0.15627, 0.02902]).unwrap()
    }

    fn m1_published() -> HermitianOperator {
        HermitianOperator::from_real(2, &[0.14061, 0.25242, 0.25242, 0.45314]).unwrap()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&Matrix::identity(2), &Matrix::identity(2)).unwrap();
        assert_eq!(k, Matrix::identity(4));
    }

    #[test]
    fn kron_of_sigma_z() {
        let z = sigma_z().into_matrix();
        let k = kron(&z, &z).unwrap();
        let expected = [1.0, -1.0, -1.0, 1.0];
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { expected[i] } else { 0.0 };
                assert_eq!(k[(i, j)], C64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn kron_f0_f1_corner() {
        let k = kron(f0().matrix(), f1().matrix()).unwrap();
        assert_eq!(k[(0, 0)].re, 1.0 - SQRT_2);
        assert_eq!((k.rows(), k.cols()), (4, 4));
    }

    #[test]
    fn kron_rejects_oversized_products() {
        let a = Matrix::identity(16);
        let b = Matrix::identity(8);
        assert_eq!(kron(&a, &b), Err(Error::Size { dim: 128, max: MAX_DIM }));
    }

    #[test]
    fn eig_sigma_z() {
        let e = herm_eig(&sigma_z()).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
    }

    #[test]
    fn eig_f1() {
        let e = herm_eig(&f1()).unwrap();
        assert!((e.values[0] + SQRT_2).abs() < 1e-14);
        assert!((e.values[1] - (2.0 - SQRT_2)).abs() < 1e-14);
    }

    #[test]
    fn published_povm_elements_are_positive() {
        for m in [m0_published(), m1_published()] {
            let e = herm_eig(&m).unwrap();
            assert!(e.values.iter().all(|&v| v > 0.0), "{:?}", e.values);
        }
        assert!(is_psd(&m1_published(), 1e-9));
    }

    #[test]
    fn psd_tests() {
        assert!(is_psd(&HermitianOperator::identity(2), 0.0));
        assert!(!is_psd(&sigma_z(), 1e-9));
    }

    #[test]
    fn frob_inner_traces() {
        let id = HermitianOperator::identity(2);
        assert_eq!(frob_inner(&id, &f0()).unwrap(), 0.0);
        assert!((frob_inner(&id, &f1()).unwrap() - (2.0 - 2.0 * SQRT_2)).abs() < 1e-15);
    }

    #[test]
    fn published_povm_regains_w() {
        let w = frob_inner(&m0_published(), &f0()).unwrap()
            + frob_inner(&m1_published(), &f1()).unwrap();
        assert!((w - 1.07142).abs() < 1e-4, "{w}");
    }

    #[test]
    fn frob_inner_dimension_mismatch() {
        let r = frob_inner(&HermitianOperator::identity(2), &HermitianOperator::identity(3));
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn hermitian_constructor_validates() {
        let bad = Matrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(HermitianOperator::new(bad), Err(Error::NotHermitian(_))));
        let rect = Matrix::zeros(2, 3);
        assert!(matches!(HermitianOperator::new(rect), Err(Error::Dimension(_))));
        let nan = Matrix::from_real(1, 1, &[f64::NAN]);
        assert_eq!(nan, Err(Error::NonFinite));
        // tiny asymmetry is averaged away
        let almost = Matrix::from_real(2, 2, &[1.0, 0.5 + 1e-13, 0.5, 1.0]).unwrap();
        let h = HermitianOperator::new(almost).unwrap();
        assert_eq!(h.matrix()[(0, 1)], h.matrix()[(1, 0)].conj());
    }
}
