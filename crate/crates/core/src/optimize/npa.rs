//! Level-1 moment-matrix upper bound on quantum values.
//!
//! The moment matrix is indexed by the identity and the projectors for all
//! but the last outcome of each setting; the last outcome is written as
//! `1 − Σ`. For real functionals the real part of any complex moment matrix
//! is again feasible, so a real PSD variable loses nothing.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bell::{BellFunctional, Event};
use crate::linalg::SymMatrix;
use crate::sdp::{self, SdpProblem, SdpSolution, SdpStatus};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NpaBound {
    pub level: usize,
    /// Primal optimum plus the functional's constant.
    pub value: f64,
    /// Dual objective plus the constant; a certified upper bound when the
    /// dual slack is PSD.
    pub dual_value: f64,
    pub solution: SdpSolution,
}

struct Basis {
    alice: Vec<Vec<usize>>,
    bob: Vec<Vec<usize>>,
    size: usize,
}

impl Basis {
    fn new(f: &BellFunctional) -> Self {
        let sc = f.scenario();
        let mut next = 1;
        let mut index = |outcomes: &[usize]| -> Vec<Vec<usize>> {
            outcomes
                .iter()
                .map(|&r| {
                    let ids = (next..next + r - 1).collect();
                    next += r - 1;
                    ids
                })
                .collect()
        };
        let alice = index(&sc.alice_outcomes);
        let bob = index(&sc.bob_outcomes);
        Self { alice, bob, size: next }
    }

    /// Coefficients of outcome `a` of a setting in the operator basis.
    fn operator(&self, ids: &[usize], a: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.size];
        if a < ids.len() {
            v[ids[a]] = 1.0;
        } else {
            v[0] = 1.0;
            for &k in ids {
                v[k] = -1.0;
            }
        }
        v
    }

    fn groups(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.alice.iter().chain(&self.bob)
    }
}

/// Adds `coeff · sym(u vᵀ)` to `c`.
fn add_outer(c: &mut SymMatrix, coeff: f64, u: &[f64], v: &[f64]) {
    for (i, &ui) in u.iter().enumerate() {
        if ui == 0.0 {
            continue;
        }
        for (j, &vj) in v.iter().enumerate() {
            if vj == 0.0 {
                continue;
            }
            let w = 0.5 * coeff * ui * vj;
            c[(i, j)] += w;
            c[(j, i)] += w;
        }
    }
}

pub fn npa_problem(f: &BellFunctional) -> Result<SdpProblem> {
    let basis = Basis::new(f);
    let n = basis.size;
    let mut p = SdpProblem::new(vec![n])?;
    let mut c = SymMatrix::zeros(n);
    let mut one = vec![0.0; n];
    one[0] = 1.0;
    for t in f.terms() {
        match t.event {
            Event::Alice { a, x } => add_outer(&mut c, t.coeff, &one, &basis.operator(&basis.alice[x], a)),
            Event::Bob { b, y } => add_outer(&mut c, t.coeff, &one, &basis.operator(&basis.bob[y], b)),
            Event::Joint { a, x, b, y } => add_outer(
                &mut c,
                t.coeff,
                &basis.operator(&basis.alice[x], a),
                &basis.operator(&basis.bob[y], b),
            ),
        }
    }
    p.set_objective(0, c)?;
    p.add_constraint(vec![(0, SymMatrix::unit_pair(n, 0, 0, 1.0))], 1.0)?;
    // projectors: ⟨E E⟩ = ⟨E⟩
    for k in 1..n {
        let mut e = SymMatrix::unit_pair(n, k, k, 1.0);
        e[(0, k)] = -0.5;
        e[(k, 0)] = -0.5;
        p.add_constraint(vec![(0, e)], 0.0)?;
    }
    // outcomes of one setting are orthogonal
    for ids in basis.groups() {
        for (i, &k) in ids.iter().enumerate() {
            for &l in &ids[i + 1..] {
                p.add_constraint(vec![(0, SymMatrix::unit_pair(n, k, l, 0.5))], 0.0)?;
            }
        }
    }
    Ok(p)
}

pub fn npa_upper_bound(f: &BellFunctional, level: usize, tol: f64) -> Result<NpaBound> {
    if level != 1 {
        return Err(Error::Domain(format!("only level 1 is implemented, got {level}")));
    }
    let p = npa_problem(f)?;
    let solution = sdp::solve(&p, tol)?;
    if solution.status != SdpStatus::Optimal {
        return Err(Error::Solver(format!("moment relaxation ended with {:?}", solution.status)));
    }
    Ok(NpaBound {
        level,
        value: solution.value + f.constant(),
        dual_value: solution.dual_value + f.constant(),
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{build_ich, build_ich3, Scenario};

    #[test]
    fn ch_bound_is_tsirelson() {
        let b = npa_upper_bound(&build_ich(), 1, 1e-10).unwrap();
        let q = (core::f64::consts::SQRT_2 - 1.0) / 2.0;
        assert!(b.value >= q - 1e-8);
        assert!((b.value - q).abs() < 1e-6, "{}", b.value);
        assert!(b.dual_value >= b.value - 1e-8);
    }

    #[test]
    fn zero_functional_and_level_check() {
        let z = BellFunctional::zero(Scenario::new(vec![2, 3], vec![2]).unwrap());
        assert!(npa_upper_bound(&z, 1, 1e-9).unwrap().value.abs() < 1e-8);
        assert!(npa_upper_bound(&build_ich(), 2, 1e-9).is_err());
    }

    #[test]
    fn ich3_bound_exceeds_povm_value() {
        let b = npa_upper_bound(&build_ich3(100.0).unwrap(), 1, 1e-9).unwrap();
        assert!(b.value >= 21.0895 - 1e-4, "{}", b.value);
    }

    #[test]
    fn constant_is_added() {
        let f = build_ich().with_constant(2.5);
        let b = npa_upper_bound(&f, 1, 1e-10).unwrap();
        assert!((b.value - 2.5 - (core::f64::consts::SQRT_2 - 1.0) / 2.0).abs() < 1e-6);
    }
}
