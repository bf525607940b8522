//! `W = tr(M₀F₀) + tr(M₁F₁)` over three-outcome qubit measurements.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::bell::RankProfile;
use crate::linalg::{HermitianOperator, SymMatrix};
use crate::quantum::{bloch_projector, BlochVector, Povm};
use crate::sdp::{self, from_real_symmetric, SdpProblem, SdpSolution, SdpStatus};
use crate::{Error, Result};

/// `F₀ = diag(1, −1)`, `F₁ = [[1−√2, 1], [1, 1−√2]]`.
pub fn f_matrices() -> [SymMatrix; 2] {
    [
        SymMatrix::diagonal(&[1.0, -1.0]),
        SymMatrix::from_rows(2, &[1.0 - SQRT_2, 1.0, 1.0, 1.0 - SQRT_2]).expect("finite"),
    ]
}

/// Truncated optimal elements `M₀`, `M₁` as commonly quoted (five digits).
pub fn quoted_optimum() -> [HermitianOperator; 2] {
    [
        HermitianOperator::from_real(2, &[0.84153, -0.15627, -0.15627, 0.02902]).expect("symmetric"),
        HermitianOperator::from_real(2, &[0.14061, 0.25242, 0.25242, 0.45314]).expect("symmetric"),
    ]
}

/// `W` for given first two elements.
pub fn w_value(m0: &HermitianOperator, m1: &HermitianOperator) -> Result<f64> {
    let [f0, f1] = f_matrices();
    let f0 = from_real_symmetric(&f0);
    let f1 = from_real_symmetric(&f1);
    Ok(crate::linalg::frob_inner(m0, &f0)? + crate::linalg::frob_inner(m1, &f1)?)
}

/// SDP maximizing `Σ_a tr(M_a G_a)` over real `d × d` POVMs.
pub fn povm_step_problem(objectives: &[SymMatrix]) -> Result<SdpProblem> {
    let d = objectives.first().map(SymMatrix::dim).ok_or_else(|| Error::InvalidProblem("no outcomes".into()))?;
    let mut p = SdpProblem::new(vec![d; objectives.len()])?;
    for (k, g) in objectives.iter().enumerate() {
        p.set_objective(k, g.clone())?;
    }
    for i in 0..d {
        for j in i..d {
            let (v, rhs) = if i == j { (1.0, 1.0) } else { (0.5, 0.0) };
            let e = SymMatrix::unit_pair(d, i, j, v);
            p.add_constraint((0..objectives.len()).map(|k| (k, e.clone())).collect(), rhs)?;
        }
    }
    Ok(p)
}

/// The W problem: blocks `M₀, M₁, M₂` with objective `F₀•M₀ + F₁•M₁`.
pub fn wopt_problem() -> SdpProblem {
    let [f0, f1] = f_matrices();
    povm_step_problem(&[f0, f1, SymMatrix::zeros(2)]).expect("static problem")
}

/// Turns SDP primal blocks into a POVM, absorbing round-off into the last
/// element.
pub(crate) fn povm_from_blocks(blocks: &[SymMatrix]) -> Result<Povm> {
    let mut elems: Vec<HermitianOperator> = blocks.iter().map(from_real_symmetric).collect();
    elems.pop();
    Povm::completed(elems)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PovmOptimum {
    pub value: f64,
    pub povm: Povm,
    pub solution: SdpSolution,
}

impl PovmOptimum {
    pub fn m0(&self) -> &HermitianOperator {
        self.povm.element(0)
    }

    pub fn m1(&self) -> &HermitianOperator {
        self.povm.element(1)
    }
}

pub fn maximize_w_povm(tol: f64) -> Result<PovmOptimum> {
    let p = wopt_problem();
    let solution = sdp::solve(&p, tol)?;
    if solution.status != SdpStatus::Optimal {
        return Err(Error::Solver(alloc::format!("W problem ended with {:?}", solution.status)));
    }
    let povm = povm_from_blocks(&solution.primal)?;
    Ok(PovmOptimum { value: solution.value, povm, solution })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveCase {
    pub profile: RankProfile,
    pub value: f64,
    /// Maximizing direction when a rank-1 element is involved.
    pub bloch: Option<BlochVector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveOptimum {
    pub value: f64,
    pub case: RankProfile,
    pub bloch: Option<BlochVector>,
    pub cases: Vec<ProjectiveCase>,
    /// Every profile attaining the maximum within `1e-12`; `case` is the
    /// first of them in canonical order.
    pub ties: Vec<RankProfile>,
}

/// `W` for a rank profile as `offset + g·v`, with rank-1 elements
/// `M₀ = ½(1+v·σ)`, `M₁ = ½(1−v·σ)`.
fn linear_form(p: RankProfile) -> (f64, [f64; 3]) {
    match (p.first(), p.second()) {
        (0, 0) => (0.0, [0.0; 3]),
        (0, 1) => (1.0 - SQRT_2, [-1.0, 0.0, 0.0]),
        (1, 0) => (0.0, [0.0, 0.0, 1.0]),
        (1, 1) => (1.0 - SQRT_2, [-1.0, 0.0, 1.0]),
        (0, 2) => (2.0 - 2.0 * SQRT_2, [0.0; 3]),
        (2, 0) => (0.0, [0.0; 3]),
        _ => unreachable!(),
    }
}

/// Projective elements `(M₀, M₁)` realizing a profile with direction `v`.
pub fn projective_elements(p: RankProfile, v: BlochVector) -> Result<[HermitianOperator; 2]> {
    let pick = |rank: u8, outcome: usize| -> Result<HermitianOperator> {
        Ok(match rank {
            0 => HermitianOperator::zero(2),
            1 => bloch_projector(v, outcome)?,
            _ => HermitianOperator::identity(2),
        })
    };
    Ok([pick(p.first(), 0)?, pick(p.second(), 1)?])
}

/// Exact maximum over projective measurements by closed form per profile.
pub fn maximize_w_projective() -> ProjectiveOptimum {
    let cases: Vec<ProjectiveCase> = RankProfile::ALL
        .iter()
        .map(|&profile| {
            let (offset, g) = linear_form(profile);
            let norm_sq = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            if norm_sq == 0.0 {
                return ProjectiveCase { profile, value: offset, bloch: None };
            }
            // max of g·v over the unit sphere is |g|, at v = g/|g|
            let norm = norm_sq.sqrt();
            let v = BlochVector { x: g[0] / norm, y: g[1] / norm, z: g[2] / norm };
            ProjectiveCase { profile, value: offset + norm, bloch: Some(v) }
        })
        .collect();
    let best = cases.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    // (1,0) and (1,1) both reach 1; the (1,1) sum carries round-off
    let tied = |c: &&ProjectiveCase| best - c.value <= 1e-12;
    let ties: Vec<RankProfile> = cases.iter().filter(tied).map(|c| c.profile).collect();
    let winner = cases.iter().find(tied).expect("six cases");
    ProjectiveOptimum { value: winner.value, case: winner.profile, bloch: winner.bloch, cases: cases.clone(), ties }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn povm_optimum() {
        let opt = maximize_w_povm(1e-10).unwrap();
        assert!((opt.value - 1.0714198987).abs() < 1e-7);
        assert!((w_value(opt.m0(), opt.m1()).unwrap() - opt.value).abs() < 1e-9);
        let r = sdp::verify_certificate(&wopt_problem(), &opt.solution, 1e-8);
        assert!(r.passed, "{:?}", r.failures);
        let [q0, _] = quoted_optimum();
        assert!((opt.m0().matrix() - q0.matrix()).max_abs() < 1e-3);
        for e in opt.povm.elements() {
            assert!(e.min_eigenvalue().unwrap() > -1e-8);
        }
    }

    #[test]
    fn quoted_elements_reproduce_w() {
        let [m0, m1] = quoted_optimum();
        assert!((w_value(&m0, &m1).unwrap() - 1.07142).abs() < 1e-4);
    }

    #[test]
    fn projective_table() {
        let opt = maximize_w_projective();
        assert_eq!(opt.value, 1.0);
        assert_eq!(opt.case, RankProfile::new(1, 0).unwrap());
        assert_eq!(opt.ties, vec![RankProfile::new(1, 0).unwrap(), RankProfile::new(1, 1).unwrap()]);
        let case = |i, j| opt.cases.iter().find(|c| c.profile == RankProfile::new(i, j).unwrap()).unwrap();
        let v = case(1, 1).bloch.unwrap();
        assert!((v.x + FRAC_1_SQRT_2).abs() < 1e-15 && (v.z - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((case(1, 1).value - 1.0).abs() < 1e-15);
        let by = |i, j| case(i, j).value;
        assert_eq!(by(0, 2), 2.0 - 2.0 * SQRT_2);
        assert_eq!(by(1, 0), 1.0);
        assert_eq!(by(0, 0), 0.0);
        assert_eq!(by(2, 0), 0.0);
        // each case value is attained by actual projectors
        for c in &opt.cases {
            let v = c.bloch.unwrap_or(BlochVector { x: 0.0, y: 0.0, z: 1.0 });
            let [m0, m1] = projective_elements(c.profile, v).unwrap();
            assert!((w_value(&m0, &m1).unwrap() - c.value).abs() < 1e-12, "{:?}", c.profile);
        }
    }
}
