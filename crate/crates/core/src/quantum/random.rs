//! Seeded samplers for states and measurements.
//!
//! All samplers take the RNG explicitly; callers derive independent streams
//! with [`stream_rng`].

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{BlochVector, Povm, PureState};
use crate::linalg::{herm_eig, HermitianOperator, Matrix};
use crate::{Error, Result, C64};

/// RNG for stream `index` of `seed`; identical regardless of how work is
/// distributed across threads.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform on the unit sphere of `C^dim` (or `R^dim` when `real`).
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize, real: bool) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
                C64::new(re, im)
            })
            .collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Uniform Bloch vector; with `real` the y component is zero.
pub fn random_bloch<R: Rng + ?Sized>(rng: &mut R, real: bool) -> BlochVector {
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
        let z: f64 = rng.sample(StandardNormal);
        if let Ok(v) = BlochVector::normalized(x, y, z) {
            if x * x + y * y + z * z > 1e-12 {
                return v;
            }
        }
    }
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize, real: bool) -> PureState {
    PureState::normalized(random_unit_vector(rng, dim, real)).expect("unit vector")
}

/// Random rank-1 projector of the given dimension.
pub fn random_projector<R: Rng + ?Sized>(rng: &mut R, dim: usize, real: bool) -> HermitianOperator {
    HermitianOperator::projector(&random_unit_vector(rng, dim, real))
}

/// Random extremal three-outcome qubit POVM `{λᵢ|wᵢ⟩⟨wᵢ|}`.
///
/// Draws two Bloch directions and a weight for the first element, solves for
/// the second weight that makes the remainder `1 − M₀ − M₁` rank one, and
/// rejects draws where the remainder is not positive.
pub fn random_extremal_qubit_povm<R: Rng + ?Sized>(rng: &mut R, real: bool) -> Povm {
    loop {
        let p0 = super::bloch_projector_unchecked(random_bloch(rng, real), 0);
        let p1 = super::bloch_projector_unchecked(random_bloch(rng, real), 0);
        let l0: f64 = rng.random_range(0.05..0.95);
        let mut a = HermitianOperator::identity(2);
        a.add_scaled(-l0, &p0).expect("qubit");
        // det(A − λ P1) = det A − λ ⟨p1|adj(A)|p1⟩ for rank-1 P1
        let m = a.matrix();
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
        let adj = HermitianOperator::symmetrized(
            Matrix::new(2, 2, alloc::vec![m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]]).expect("finite"),
        );
        let denom = crate::linalg::frob_inner(&adj, &p1).expect("qubit");
        if denom.abs() < 1e-9 {
            continue;
        }
        let l1 = det / denom;
        if !(l1 > 1e-3 && l1 <= 1.0) {
            continue;
        }
        let m0 = p0.scale(l0);
        let m1 = p1.scale(l1);
        let mut m2 = HermitianOperator::identity(2);
        m2.add_scaled(-1.0, &m0).expect("qubit");
        m2.add_scaled(-1.0, &m1).expect("qubit");
        let eig = herm_eig(&m2).expect("2x2");
        if eig.values[0] < -1e-12 || eig.values[1] < 1e-3 {
            continue;
        }
        if let Ok(p) = Povm::completed(alloc::vec![m0, m1]) {
            return p;
        }
    }
}

/// Random rank-1 POVM with `outcomes` elements on `dim` dimensions, built as
/// `S^{-1/2} Pᵢ S^{-1/2}` with `S = Σ Pᵢ` for random rank-1 projectors `Pᵢ`.
pub fn random_rank_one_povm<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    outcomes: usize,
    real: bool,
) -> Result<Povm> {
    if outcomes < dim {
        return Err(Error::Domain("rank-1 POVM needs at least dim outcomes".into()));
    }
    loop {
        let ps: Vec<HermitianOperator> = (0..outcomes).map(|_| random_projector(rng, dim, real)).collect();
        let mut s = HermitianOperator::zero(dim);
        for p in &ps {
            s.add_scaled(1.0, p)?;
        }
        let eig = herm_eig(&s)?;
        if eig.values[0] < 1e-3 {
            continue;
        }
        let inv_sqrt = eig.map_spectrum(|x| 1.0 / x.sqrt());
        let mut elems: Vec<HermitianOperator> = ps
            .iter()
            .map(|p| p.conjugate_by(inv_sqrt.matrix()))
            .collect::<Result<_>>()?;
        elems.pop();
        return Povm::completed(elems);
    }
}
