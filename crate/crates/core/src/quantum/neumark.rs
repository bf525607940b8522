//! Projective realization of a three-outcome qubit POVM on a qutrit.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{DensityMatrix, Povm, POVM_TOL};
use crate::linalg::{herm_eig, HermitianOperator, Matrix};
use crate::{Error, Result, C64};

/// Result of [`neumark_dilate`].
///
/// `isometry` is the 3×2 matrix `V` with rows `√λᵢ⟨wᵢ|`, so that
/// `tr(ρ Mᵢ) = ⟨i|VρV†|i⟩`. `unitary` extends `V` by one orthonormal column.
/// `projectors` are `U†|i⟩⟨i|U`, which act on the embedded state `ρ ⊕ 0`.
#[derive(Clone, Debug)]
pub struct NeumarkDilation {
    pub isometry: Matrix,
    pub unitary: Matrix,
    pub projectors: Vec<HermitianOperator>,
}

impl NeumarkDilation {
    /// `ρ ⊕ 0` on the three-dimensional space.
    pub fn embed(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != 2 {
            return Err(Error::Dimension(format!("qubit state expected, got {}", rho.dim())));
        }
        let mut m = Matrix::zeros(3, 3);
        let r = rho.operator().matrix();
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = r[(i, j)];
            }
        }
        DensityMatrix::new(HermitianOperator::symmetrized(m))
    }

    /// `VρV†`.
    pub fn push_forward(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(rho.operator().conjugate_by(&self.isometry)?)
    }

    /// Outcome probabilities `tr((ρ ⊕ 0) Πᵢ)`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        let embedded = self.embed(rho)?;
        self.projectors
            .iter()
            .map(|p| crate::linalg::frob_inner(embedded.operator(), p))
            .collect()
    }
}

/// Dilates a 3-outcome qubit POVM whose elements have rank at most one
/// into a rank-1 projective measurement on a qutrit.
pub fn neumark_dilate(povm: &Povm) -> Result<NeumarkDilation> {
    if povm.outcomes() != 3 || povm.dim() != 2 {
        return Err(Error::InvalidPovm(format!(
            "{} outcomes on dimension {}, expected 3 on a qubit",
            povm.outcomes(),
            povm.dim()
        )));
    }
    Povm::new(povm.elements().to_vec())?;

    let mut v = Matrix::zeros(3, 2);
    for (i, e) in povm.elements().iter().enumerate() {
        let eig = herm_eig(e)?;
        if eig.values[0] > POVM_TOL {
            return Err(Error::NotExtremal(i));
        }
        let lambda = eig.values[1].max(0.0);
        let w = eig.vector(1);
        let s = lambda.sqrt();
        for (j, wj) in w.iter().enumerate() {
            v[(i, j)] = wj.conj() * s;
        }
    }

    let u = complete_to_unitary(&v);
    let projectors = (0..3)
        .map(|i| {
            // U†|i⟩⟨i|U = |uᵢ⟩⟨uᵢ| with uᵢ the conjugated i-th row of U
            let row: Vec<C64> = (0..3).map(|j| u[(i, j)].conj()).collect();
            HermitianOperator::projector(&row)
        })
        .collect();
    Ok(NeumarkDilation { isometry: v, unitary: u, projectors })
}

/// Appends one column orthonormal to the two columns of `v` by Gram–Schmidt
/// against the computational basis vector with the largest residual.
fn complete_to_unitary(v: &Matrix) -> Matrix {
    let cols = [v.column(0), v.column(1)];
    let mut best: Option<(f64, Vec<C64>)> = None;
    for k in 0..3 {
        let mut e: Vec<C64> = (0..3).map(|i| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect();
        for c in &cols {
            let overlap: C64 = c.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
            for (ei, ci) in e.iter_mut().zip(c) {
                *ei -= ci * overlap;
            }
        }
        let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|(n, _)| norm > *n) {
            best = Some((norm, e));
        }
    }
    let (norm, mut e) = best.expect("three candidates");
    e.iter_mut().for_each(|z| *z /= norm);
    // one more pass against round-off
    for c in &cols {
        let overlap: C64 = c.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
        for (ei, ci) in e.iter_mut().zip(c) {
            *ei -= ci * overlap;
        }
    }
    let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut u = Matrix::zeros(3, 3);
    for i in 0..3 {
        u[(i, 0)] = v[(i, 0)];
        u[(i, 1)] = v[(i, 1)];
        u[(i, 2)] = e[i] / norm;
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_rank_two_element() {
        let povm = Povm::new(vec![
            HermitianOperator::identity(2),
            HermitianOperator::zero(2),
            HermitianOperator::zero(2),
        ])
        .unwrap();
        assert_eq!(neumark_dilate(&povm).unwrap_err(), Error::NotExtremal(0));
    }

    #[test]
    fn degenerate_two_outcome_case_embeds_diagonally() {
        let p0 = HermitianOperator::from_real(2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let p1 = HermitianOperator::from_real(2, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let povm = Povm::new(vec![p0, p1, HermitianOperator::zero(2)]).unwrap();
        let d = neumark_dilate(&povm).unwrap();
        for (i, p) in d.projectors.iter().enumerate() {
            for r in 0..3 {
                for c in 0..3 {
                    let want = if r == i && c == i { 1.0 } else { 0.0 };
                    assert!((p.matrix()[(r, c)].norm() - want).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn wrong_shape_rejected() {
        let povm = Povm::from_bloch(crate::quantum::BlochVector::new(0.0, 0.0, 1.0).unwrap());
        assert!(matches!(neumark_dilate(&povm), Err(Error::InvalidPovm(_))));
    }
}
