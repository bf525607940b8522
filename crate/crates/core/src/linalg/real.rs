//! Real dense matrices for the SDP solver.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Square real matrix, row-major. Symmetric wherever the SDP code uses it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "LowerTriangle", try_from = "LowerTriangle")]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn scaled_identity(n: usize, k: f64) -> Self {
        let mut m = Self::identity(n);
        m.scale_mut(k);
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Build from a full row-major array, averaging the two triangles.
    pub fn from_rows(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!("{} entries for a {n}x{n} matrix", entries.len())));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut m = Self { n, data: entries.to_vec() };
        m.symmetrize();
        Ok(m)
    }

    /// Matrix with `v` at `(i, j)` and `(j, i)`.
    pub fn unit_pair(n: usize, i: usize, j: usize, v: f64) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = v;
        m[(j, i)] = v;
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg;
            }
        }
    }

    pub fn scale_mut(&mut self, k: f64) {
        self.data.iter_mut().for_each(|x| *x *= k);
    }

    pub fn scaled(&self, k: f64) -> Self {
        let mut m = self.clone();
        m.scale_mut(k);
        m
    }

    /// `self += k·other`
    pub fn axpy(&mut self, k: f64, other: &SymMatrix) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += k * b;
        }
    }

    pub fn plus(&self, other: &SymMatrix) -> Self {
        let mut m = self.clone();
        m.axpy(1.0, other);
        m
    }

    pub fn minus(&self, other: &SymMatrix) -> Self {
        let mut m = self.clone();
        m.axpy(-1.0, other);
        m
    }

    /// `tr(AᵀB)`.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn matmul(&self, other: &SymMatrix) -> SymMatrix {
        let n = self.n;
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> SymMatrix {
        let n = self.n;
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    /// `Gᵀ A G`, symmetrized.
    pub fn congruence(&self, g: &SymMatrix) -> SymMatrix {
        let mut m = g.transpose().matmul(&self.matmul(g));
        m.symmetrize();
        m
    }

    /// `G A Gᵀ`, symmetrized.
    pub fn congruence_t(&self, g: &SymMatrix) -> SymMatrix {
        let mut m = g.matmul(&self.matmul(&g.transpose()));
        m.symmetrize();
        m
    }

    /// Entries on and below the diagonal, row by row.
    pub fn lower_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n + 1) / 2);
        for i in 0..self.n {
            for j in 0..=i {
                out.push(self[(i, j)]);
            }
        }
        out
    }

    pub fn from_lower_triangle(n: usize, lower: &[f64]) -> Result<Self> {
        if lower.len() != n * (n + 1) / 2 {
            return Err(Error::Dimension(format!(
                "{} lower-triangle entries for dimension {n}",
                lower.len()
            )));
        }
        if lower.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut m = Self::zeros(n);
        let mut k = 0;
        for i in 0..n {
            for j in 0..=i {
                m[(i, j)] = lower[k];
                m[(j, i)] = lower[k];
                k += 1;
            }
        }
        Ok(m)
    }

    /// Symmetric vectorization with `√2` on off-diagonal entries, so that
    /// `svec(A)·svec(B) = A•B`.
    pub fn svec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n + 1) / 2);
        for i in 0..self.n {
            out.push(self[(i, i)]);
            for j in (i + 1)..self.n {
                out.push(core::f64::consts::SQRT_2 * self[(i, j)]);
            }
        }
        out
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for SymMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Serialize, Deserialize)]
struct LowerTriangle {
    dim: usize,
    lower: Vec<f64>,
}

impl From<SymMatrix> for LowerTriangle {
    fn from(m: SymMatrix) -> Self {
        LowerTriangle { dim: m.n, lower: m.lower_triangle() }
    }
}

impl TryFrom<LowerTriangle> for SymMatrix {
    type Error = Error;
    fn try_from(r: LowerTriangle) -> Result<Self> {
        SymMatrix::from_lower_triangle(r.dim, &r.lower)
    }
}

/// Real symmetric eigendecomposition; eigenvalues ascending, eigenvectors
/// in the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: SymMatrix,
}

impl SymEigen {
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.values.len();
        let mut out = SymMatrix::zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let fk = f(lam);
            if fk == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)];
                }
            }
        }
        out.symmetrize();
        out
    }

    /// `V diag(f(λ))`, columns scaled.
    pub fn scaled_vectors(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.values.len();
        let mut out = self.vectors.clone();
        for k in 0..n {
            let fk = f(self.values[k]);
            for i in 0..n {
                out[(i, k)] *= fk;
            }
        }
        out
    }
}

pub fn sym_eig(a: &SymMatrix) -> Result<SymEigen> {
    let n = a.n;
    let mut m = a.clone();
    let mut v = SymMatrix::identity(n);
    let off = |m: &SymMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let threshold = 4.0 * f64::EPSILON * m.frobenius_norm();
    let mut converged = n <= 1 || off(&m) <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                if sweeps > 3 && apq.abs() <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        converged = off(&m) <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps, residual: off(&m) });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = SymMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Cholesky factor `L` (lower) of a symmetric positive definite matrix,
/// stored densely. Returns `None` when a pivot is not positive.
pub fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Some(l)
}

/// Solve `L Lᵀ x = b` given the Cholesky factor.
pub fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}
