//! Dense block-diagonal semidefinite programs.
//!
//! Problems are stated as
//!
//! ```text
//! maximize   Σ_k C_k • X_k
//! subject to Σ_k A_ik • X_k = b_i,   X_k ⪰ 0
//! ```
//!
//! with dual `minimize bᵀy s.t. Σ_i y_i A_i − C ⪰ 0`. The solver is a
//! primal-dual interior point method with Nesterov–Todd scaling and a
//! Mehrotra predictor-corrector step.

mod ipm;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::linalg::{sym_eig, HermitianOperator, Matrix, SymMatrix};
use crate::{Error, Result, C64};

pub use ipm::solve;

/// Largest total dimension Σ block dims accepted by [`solve`].
pub const MAX_TOTAL_DIM: usize = 128;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    /// `(block, A_k)` pairs; blocks not listed carry a zero matrix.
    pub terms: Vec<(usize, SymMatrix)>,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemRecord")]
pub struct SdpProblem {
    blocks: Vec<usize>,
    objective: Vec<SymMatrix>,
    constraints: Vec<Constraint>,
}

#[derive(Deserialize)]
struct ProblemRecord {
    blocks: Vec<usize>,
    objective: Vec<SymMatrix>,
    constraints: Vec<Constraint>,
}

impl TryFrom<ProblemRecord> for SdpProblem {
    type Error = Error;
    fn try_from(r: ProblemRecord) -> Result<Self> {
        let mut p = SdpProblem::new(r.blocks)?;
        if r.objective.len() != p.blocks.len() {
            return Err(Error::InvalidProblem("one objective matrix per block expected".into()));
        }
        for (k, c) in r.objective.into_iter().enumerate() {
            p.set_objective(k, c)?;
        }
        for c in r.constraints {
            p.add_constraint(c.terms, c.rhs)?;
        }
        Ok(p)
    }
}

impl SdpProblem {
    /// Empty problem (zero objective, no constraints) over the given blocks.
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::InvalidProblem("block dimensions must be positive".into()));
        }
        let total: usize = blocks.iter().sum();
        if total > MAX_TOTAL_DIM {
            return Err(Error::Size { dim: total, max: MAX_TOTAL_DIM });
        }
        let objective = blocks.iter().map(|&n| SymMatrix::zeros(n)).collect();
        Ok(Self { blocks, objective, constraints: Vec::new() })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn objective(&self) -> &[SymMatrix] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    fn check_block(&self, k: usize, m: &SymMatrix) -> Result<()> {
        let n = *self
            .blocks
            .get(k)
            .ok_or_else(|| Error::InvalidProblem(format!("block {k} out of range")))?;
        if m.dim() != n {
            return Err(Error::Dimension(format!("block {k} has dimension {n}, matrix has {}", m.dim())));
        }
        if m.entries().iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asym = (m.minus(&m.transpose())).max_abs();
        if asym > 1e-12 * (1.0 + m.max_abs()) {
            return Err(Error::InvalidProblem(format!("block {k} matrix not symmetric ({asym:e})")));
        }
        Ok(())
    }

    pub fn set_objective(&mut self, block: usize, mut c: SymMatrix) -> Result<()> {
        self.check_block(block, &c)?;
        c.symmetrize();
        self.objective[block] = c;
        Ok(())
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, SymMatrix)>, rhs: f64) -> Result<()> {
        if !rhs.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut merged: Vec<(usize, SymMatrix)> = Vec::new();
        for (k, mut a) in terms {
            self.check_block(k, &a)?;
            a.symmetrize();
            match merged.iter_mut().find(|(j, _)| *j == k) {
                Some((_, m)) => m.axpy(1.0, &a),
                None => merged.push((k, a)),
            }
        }
        merged.sort_by_key(|(k, _)| *k);
        self.constraints.push(Constraint { terms: merged, rhs });
        Ok(())
    }

    /// `Σ_k C_k • X_k`
    pub fn objective_value(&self, x: &[SymMatrix]) -> f64 {
        self.objective.iter().zip(x).map(|(c, xk)| c.dot(xk)).sum()
    }

    /// `A_i • X`
    pub fn constraint_value(&self, i: usize, x: &[SymMatrix]) -> f64 {
        self.constraints[i].terms.iter().map(|(k, a)| a.dot(&x[*k])).sum()
    }

    /// `Σ y_i A_i − C`, per block.
    pub fn dual_slack(&self, y: &[f64]) -> Vec<SymMatrix> {
        let mut z: Vec<SymMatrix> = self.objective.iter().map(|c| c.scaled(-1.0)).collect();
        for (yi, con) in y.iter().zip(&self.constraints) {
            for (k, a) in &con.terms {
                z[*k].axpy(*yi, a);
            }
        }
        z
    }

    /// Copy with every objective matrix multiplied by `s`.
    pub fn with_scaled_objective(&self, s: f64) -> Self {
        Self { objective: self.objective.iter().map(|c| c.scaled(s)).collect(), ..self.clone() }
    }

    /// Copy with blocks reordered: new block `j` is old block `perm[j]`.
    pub fn permuted_blocks(&self, perm: &[usize]) -> Result<Self> {
        let nb = self.blocks.len();
        let mut seen = vec![false; nb];
        if perm.len() != nb || perm.iter().any(|&p| p >= nb || core::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidProblem("not a permutation of the blocks".into()));
        }
        let mut inverse = vec![0; nb];
        for (j, &p) in perm.iter().enumerate() {
            inverse[p] = j;
        }
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                let mut terms: Vec<(usize, SymMatrix)> = c.terms.iter().map(|(k, a)| (inverse[*k], a.clone())).collect();
                terms.sort_by_key(|(k, _)| *k);
                Constraint { terms, rhs: c.rhs }
            })
            .collect();
        Ok(Self {
            blocks: perm.iter().map(|&p| self.blocks[p]).collect(),
            objective: perm.iter().map(|&p| self.objective[p].clone()).collect(),
            constraints,
        })
    }

    /// Constraint rows that are linear combinations of earlier rows.
    pub fn dependent_constraints(&self) -> Vec<usize> {
        let rows: Vec<Vec<f64>> = self
            .constraints
            .iter()
            .map(|c| {
                let mut v = Vec::new();
                for (k, &n) in self.blocks.iter().enumerate() {
                    match c.terms.iter().find(|(j, _)| *j == k) {
                        Some((_, a)) => v.extend(a.svec()),
                        None => v.resize(v.len() + n * (n + 1) / 2, 0.0),
                    }
                }
                v
            })
            .collect();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut dependent = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let norm0 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut r = row.clone();
            for _ in 0..2 {
                for q in &basis {
                    let d: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
                    r.iter_mut().zip(q).for_each(|(x, qx)| *x -= d * qx);
                }
            }
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= 1e-10 * norm0.max(1.0) {
                dependent.push(i);
            } else {
                basis.push(r.into_iter().map(|x| x / norm).collect());
            }
        }
        dependent
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `max_i |A_i•X − b_i|`
    pub primal_eq: f64,
    /// `max |Σ y_i A_i − C − Z|`
    pub dual_eq: f64,
    /// Smallest eigenvalue over the primal blocks.
    pub min_eig: f64,
    /// Smallest eigenvalue over the dual slack blocks.
    pub dual_min_eig: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Primal objective `Σ C•X`.
    pub value: f64,
    /// Dual objective `bᵀy`.
    pub dual_value: f64,
    pub primal: Vec<SymMatrix>,
    pub dual: Vec<f64>,
    pub slack: Vec<SymMatrix>,
    /// `X • Z`, which equals `dual_value − value` at feasibility.
    pub gap: f64,
    pub residuals: Residuals,
    pub iterations: usize,
}

/// Independent recomputation of a solution's residuals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub passed: bool,
    pub primal_eq: f64,
    pub primal_min_eig: f64,
    pub dual_min_eig: f64,
    pub gap: f64,
    pub failures: Vec<String>,
}

fn min_eig_blocks(ms: &[SymMatrix]) -> Result<f64> {
    let mut m = f64::INFINITY;
    for b in ms {
        m = m.min(sym_eig(b)?.values[0]);
    }
    Ok(m)
}

/// Recomputes feasibility and the duality gap from the raw primal matrices
/// and dual multipliers; the slack stored in the solution is not trusted.
pub fn verify_certificate(p: &SdpProblem, s: &SdpSolution, tol: f64) -> CertificateReport {
    let mut failures = Vec::new();
    if s.status != SdpStatus::Optimal {
        failures.push(format!("status {:?}", s.status));
    }
    let shape_ok = s.primal.len() == p.blocks.len()
        && s.primal.iter().zip(&p.blocks).all(|(x, &n)| x.dim() == n)
        && s.dual.len() == p.constraints.len();
    if !shape_ok {
        failures.push("solution shape does not match problem".into());
        return CertificateReport {
            passed: false,
            primal_eq: f64::INFINITY,
            primal_min_eig: f64::NEG_INFINITY,
            dual_min_eig: f64::NEG_INFINITY,
            gap: f64::INFINITY,
            failures,
        };
    }
    let primal_eq = (0..p.constraints.len())
        .map(|i| (p.constraint_value(i, &s.primal) - p.constraints[i].rhs).abs())
        .fold(0.0, f64::max);
    let z = p.dual_slack(&s.dual);
    let primal_min_eig = min_eig_blocks(&s.primal).unwrap_or(f64::NEG_INFINITY);
    let dual_min_eig = min_eig_blocks(&z).unwrap_or(f64::NEG_INFINITY);
    let dual_value: f64 = s.dual.iter().zip(&p.constraints).map(|(y, c)| y * c.rhs).sum();
    let gap = dual_value - p.objective_value(&s.primal);
    if !(primal_eq <= tol) {
        failures.push(format!("equality residual {primal_eq:e} > {tol:e}"));
    }
    if !(primal_min_eig >= -tol) {
        failures.push(format!("primal min eigenvalue {primal_min_eig:e}"));
    }
    if !(dual_min_eig >= -tol) {
        failures.push(format!("dual slack min eigenvalue {dual_min_eig:e}"));
    }
    if !(gap.abs() <= tol) {
        failures.push(format!("duality gap {gap:e} > {tol:e}"));
    }
    CertificateReport { passed: failures.is_empty(), primal_eq, primal_min_eig, dual_min_eig, gap, failures }
}

/// Real `2n × 2n` embedding `[[Re H, −Im H], [Im H, Re H]]`; inner products
/// double: `R(A)•R(B) = 2 Re tr(A B)`.
pub fn realify(h: &HermitianOperator) -> SymMatrix {
    let n = h.dim();
    let m = h.matrix();
    let mut out = SymMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    out
}

/// Inverse of [`realify`] for any symmetric `2n × 2n` matrix, projecting
/// onto the image of the embedding first.
pub fn derealify(x: &SymMatrix) -> Result<HermitianOperator> {
    let n2 = x.dim();
    if !n2.is_multiple_of(2) {
        return Err(Error::Dimension(format!("odd dimension {n2} cannot be derealified")));
    }
    let n = n2 / 2;
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let re = 0.5 * (x[(i, j)] + x[(i + n, j + n)]);
            let im = 0.5 * (x[(i + n, j)] - x[(i, j + n)]);
            data.push(C64::new(re, im));
        }
    }
    Ok(HermitianOperator::symmetrized(Matrix::new(n, n, data)?))
}

/// Real part of a Hermitian operator as a symmetric matrix.
pub fn real_part(h: &HermitianOperator) -> SymMatrix {
    let n = h.dim();
    let mut out = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = h.matrix()[(i, j)].re;
        }
    }
    out
}

pub fn from_real_symmetric(x: &SymMatrix) -> HermitianOperator {
    let n = x.dim();
    let data = x.entries().iter().map(|&v| C64::new(v, 0.0)).collect();
    HermitianOperator::symmetrized(Matrix::new(n, n, data).expect("finite entries"))
}

#[cfg(test)]
mod tests;
