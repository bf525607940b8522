use super::*;
use crate::quantum::random::stream_rng;
use alloc::vec;
use rand::Rng;

const SQRT_2: f64 = core::f64::consts::SQRT_2;
const W: f64 = 1.0714198987;

fn max_eig_problem(c: SymMatrix) -> SdpProblem {
    let n = c.dim();
    let mut p = SdpProblem::new(vec![n]).unwrap();
    p.set_objective(0, c).unwrap();
    p.add_constraint(vec![(0, SymMatrix::identity(n))], 1.0).unwrap();
    p
}

fn wopt_problem() -> SdpProblem {
    let mut p = SdpProblem::new(vec![2, 2, 2]).unwrap();
    p.set_objective(0, SymMatrix::from_rows(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()).unwrap();
    p.set_objective(1, SymMatrix::from_rows(2, &[1.0 - SQRT_2, 1.0, 1.0, 1.0 - SQRT_2]).unwrap()).unwrap();
    for (i, j, rhs) in [(0, 0, 1.0), (1, 1, 1.0), (0, 1, 0.0)] {
        let v = if i == j { 1.0 } else { 0.5 };
        let e = SymMatrix::unit_pair(2, i, j, v);
        p.add_constraint(vec![(0, e.clone()), (1, e.clone()), (2, e)], rhs).unwrap();
    }
    p
}

fn random_symmetric(seed: u64, n: usize) -> SymMatrix {
    let mut rng = stream_rng(seed, 0);
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = rng.random_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

#[test]
fn max_eigenvalue_sdp() {
    let p = max_eig_problem(SymMatrix::diagonal(&[1.0, -1.0]));
    let s = solve(&p, 1e-10).unwrap();
    assert_eq!(s.status, SdpStatus::Optimal);
    assert!((s.value - 1.0).abs() < 1e-9);
    assert!((s.primal[0][(0, 0)] - 1.0).abs() < 1e-8);
    assert!(s.primal[0][(1, 1)].abs() < 1e-8);
    assert!(verify_certificate(&p, &s, 1e-9).passed);
}

#[test]
fn wopt_value() {
    let p = wopt_problem();
    let s = solve(&p, 1e-10).unwrap();
    assert_eq!(s.status, SdpStatus::Optimal);
    assert!((s.value - W).abs() < 1e-7, "{}", s.value);
    let r = verify_certificate(&p, &s, 1e-8);
    assert!(r.passed, "{:?}", r.failures);
    assert!(s.dual_value >= s.value - s.gap - 1e-12);
}

#[test]
fn random_max_eigenvalue_matches_eigensolver() {
    for seed in 0..8 {
        let c = random_symmetric(seed, 4);
        let want = sym_eig(&c).unwrap().values[3];
        let p = max_eig_problem(c);
        let s = solve(&p, 1e-10).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.value - want).abs() < 1e-8, "seed {seed}");
        assert!(verify_certificate(&p, &s, 1e-9).passed);
    }
}

#[test]
fn scaling_and_permutation_invariance() {
    let p = wopt_problem();
    let base = solve(&p, 1e-10).unwrap().value;
    let mut rng = stream_rng(11, 0);
    for _ in 0..3 {
        let k: f64 = rng.random_range(0.1..10.0);
        let v = solve(&p.with_scaled_objective(k), 1e-10).unwrap().value;
        assert!((v - k * base).abs() <= 1e-8 * (k * base).abs());
    }
    for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
        let q = p.permuted_blocks(&perm).unwrap();
        let s = solve(&q, 1e-10).unwrap();
        assert!((s.value - base).abs() < 1e-8);
        assert!(verify_certificate(&q, &s, 1e-8).passed);
    }
    assert!(p.permuted_blocks(&[0, 0, 1]).is_err());
}

#[test]
fn dependent_rows_named() {
    let mut p = max_eig_problem(SymMatrix::identity(2));
    p.add_constraint(vec![(0, SymMatrix::scaled_identity(2, 2.0))], 2.0).unwrap();
    p.add_constraint(vec![(0, SymMatrix::unit_pair(2, 0, 1, 1.0))], 0.0).unwrap();
    p.add_constraint(vec![(0, SymMatrix::diagonal(&[1.0, 1.0])), (0, SymMatrix::unit_pair(2, 0, 1, 1.0))], 1.0)
        .unwrap();
    assert_eq!(solve(&p, 1e-9).unwrap_err(), Error::DependentConstraints(vec![1, 3]));
}

#[test]
fn infeasible_problem_detected() {
    // tr X = −1 has no PSD solution
    let mut p = SdpProblem::new(vec![2]).unwrap();
    p.set_objective(0, SymMatrix::identity(2)).unwrap();
    p.add_constraint(vec![(0, SymMatrix::identity(2))], -1.0).unwrap();
    let s = solve(&p, 1e-9).unwrap();
    assert_eq!(s.status, SdpStatus::Infeasible);
    assert!(!verify_certificate(&p, &s, 1e-9).passed);
}

#[test]
fn unbounded_problem_detected() {
    // maximize X_00 subject to X_11 = 1: X_00 is free to grow
    let mut p = SdpProblem::new(vec![2]).unwrap();
    p.set_objective(0, SymMatrix::diagonal(&[1.0, 0.0])).unwrap();
    p.add_constraint(vec![(0, SymMatrix::diagonal(&[0.0, 1.0]))], 1.0).unwrap();
    let s = solve(&p, 1e-9).unwrap();
    assert_eq!(s.status, SdpStatus::Infeasible);
}

#[test]
fn perturbed_primal_is_flagged() {
    let p = wopt_problem();
    let mut s = solve(&p, 1e-10).unwrap();
    s.primal[0][(0, 0)] += 1e-3;
    let r = verify_certificate(&p, &s, 1e-8);
    assert!(!r.passed);
    assert!(r.primal_eq > 9e-4);
    assert!(r.failures.iter().any(|f| f.contains("equality")));
}

#[test]
fn tolerance_and_shape_validation() {
    let p = wopt_problem();
    assert!(matches!(solve(&p, 1e-3), Err(Error::Domain(_))));
    assert!(matches!(solve(&p, 0.0), Err(Error::Domain(_))));
    assert!(SdpProblem::new(vec![]).is_err());
    assert!(matches!(SdpProblem::new(vec![100, 29]), Err(Error::Size { .. })));
    let mut q = SdpProblem::new(vec![2]).unwrap();
    assert!(q.set_objective(0, SymMatrix::identity(3)).is_err());
    assert!(q.set_objective(1, SymMatrix::identity(2)).is_err());
    let asym = SymMatrix::from_rows(2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(q.add_constraint(vec![(0, asym)], f64::NAN).is_err());
}

#[test]
fn no_constraints_bounded_problem() {
    // maximize −tr X over X ⪰ 0 gives 0
    let mut p = SdpProblem::new(vec![3]).unwrap();
    p.set_objective(0, SymMatrix::scaled_identity(3, -1.0)).unwrap();
    let s = solve(&p, 1e-9).unwrap();
    assert_eq!(s.status, SdpStatus::Optimal);
    assert!(s.value.abs() < 1e-9);
}

#[test]
fn problem_json_round_trip() {
    let p = wopt_problem();
    let text = serde_json::to_string(&p).unwrap();
    let back: SdpProblem = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p);
}

#[test]
fn realification_doubles_inner_products() {
    let a = HermitianOperator::new(
        Matrix::new(2, 2, vec![C64::new(1.0, 0.0), C64::new(0.2, -0.7), C64::new(0.2, 0.7), C64::new(-0.5, 0.0)]).unwrap(),
    )
    .unwrap();
    let b = HermitianOperator::new(
        Matrix::new(2, 2, vec![C64::new(0.3, 0.0), C64::new(-0.1, 0.4), C64::new(-0.1, -0.4), C64::new(2.0, 0.0)]).unwrap(),
    )
    .unwrap();
    let want = 2.0 * crate::linalg::frob_inner(&a, &b).unwrap();
    assert!((realify(&a).dot(&realify(&b)) - want).abs() < 1e-14);
    let back = derealify(&realify(&a)).unwrap();
    assert!((back.matrix() - a.matrix()).max_abs() < 1e-15);
}

#[test]
fn complex_max_eigenvalue_via_realification() {
    // σ_y has top eigenvalue 1 with a complex eigenvector
    let sy = HermitianOperator::new(
        Matrix::new(2, 2, vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)]).unwrap(),
    )
    .unwrap();
    let mut p = SdpProblem::new(vec![4]).unwrap();
    p.set_objective(0, realify(&sy)).unwrap();
    p.add_constraint(vec![(0, realify(&HermitianOperator::identity(2)))], 2.0).unwrap();
    let s = solve(&p, 1e-10).unwrap();
    assert!((s.value / 2.0 - 1.0).abs() < 1e-9);
    let x = derealify(&s.primal[0]).unwrap();
    assert!((x.trace() - 1.0).abs() < 1e-9);
}
