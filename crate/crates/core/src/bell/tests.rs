use super::*;
use crate::quantum::{bloch_projector, bob_ch_vectors, psi_plus, BlochVector};
use alloc::vec;

const SQRT_2: f64 = core::f64::consts::SQRT_2;

fn brute_force(f: &BellFunctional) -> LocalBound {
    let sc = f.scenario();
    let radices: Vec<usize> = sc.alice_outcomes.iter().chain(&sc.bob_outcomes).copied().collect();
    let mut digits = vec![0usize; radices.len()];
    let mut best: Option<LocalBound> = None;
    loop {
        let s = Strategy { alice: digits[..sc.alice_settings()].to_vec(), bob: digits[sc.alice_settings()..].to_vec() };
        let v = f.deterministic_value(&s);
        if best.as_ref().is_none_or(|b| v > b.value + 1e-12 * (1.0 + b.value.abs())) {
            best = Some(LocalBound { value: v, strategy: s });
        }
        let mut k = radices.len();
        loop {
            if k == 0 {
                return best.unwrap();
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < radices[k] {
                break;
            }
            digits[k] = 0;
        }
    }
}

fn ch_measurements() -> (Vec<Povm>, Vec<Povm>) {
    let alice = vec![
        Povm::from_bloch(BlochVector::new(0.0, 0.0, 1.0).unwrap()),
        Povm::from_bloch(BlochVector::new(1.0, 0.0, 0.0).unwrap()),
    ];
    let [b0, b1] = bob_ch_vectors();
    (alice, vec![Povm::from_bloch(b0), Povm::from_bloch(b1)])
}

#[test]
fn ich_on_zero_strategy() {
    let s = Strategy { alice: vec![0, 0], bob: vec![0, 0] };
    assert_eq!(build_ich().deterministic_value(&s), 0.0);
}

#[test]
fn local_bounds() {
    let lb = local_bound(&build_ich()).unwrap();
    assert_eq!(lb.value, 0.0);
    assert_eq!(lb.strategy, brute_force(&build_ich()).strategy);
    let i3 = local_bound(&build_i3()).unwrap();
    assert!((i3.value - 1.0).abs() < 1e-15);
    assert_eq!(i3.strategy.alice[2], 0);
    assert_eq!(i3.strategy.bob, vec![0, 0]);
    for c in [0.5, 1.0, 3.0, 100.0] {
        let f = build_ich3(c).unwrap();
        let lb = local_bound(&f).unwrap();
        assert!((lb.value - 1.0).abs() < 1e-12, "c={c}: {}", lb.value);
        let bf = brute_force(&f);
        assert_eq!(lb.strategy, bf.strategy);
    }
}

#[test]
fn constant_only_functional() {
    let sc = Scenario::new(vec![2, 2], vec![2, 2]).unwrap();
    let f = BellFunctional::new(sc, 3.25, []).unwrap();
    assert_eq!(local_bound(&f).unwrap().value, 3.25);
}

#[test]
fn all_outcome_two_is_zero_for_i3() {
    let s = Strategy { alice: vec![0, 0, 2], bob: vec![1, 0] };
    assert_eq!(build_i3().deterministic_value(&s), 0.0);
}

#[test]
fn ich3_rejects_nonpositive_c() {
    assert!(matches!(build_ich3(0.0), Err(Error::Domain(_))));
    assert!(matches!(build_ich3(-1.0), Err(Error::Domain(_))));
    assert!(build_derived(RankProfile::new(1, 1).unwrap(), -2.0).is_err());
}

#[test]
fn rank_profiles() {
    assert!(RankProfile::new(1, 2).is_err());
    assert!(RankProfile::new(3, 0).is_err());
    assert_eq!(RankProfile::parse("I02").unwrap(), RankProfile::new(0, 2).unwrap());
    assert_eq!(RankProfile::parse("i11").unwrap().label(), "I11");
    assert!(RankProfile::parse("I21").is_err());
}

#[test]
fn derived_forms() {
    let d00 = build_derived(RankProfile::new(0, 0).unwrap(), 2.0).unwrap();
    assert_eq!(d00.stated_bound, 0.0);
    assert_eq!(d00.functional, build_ich().scaled(2.0).embed(d00.functional.scenario().clone()).unwrap());
    let d11 = build_derived(RankProfile::new(1, 1).unwrap(), 100.0).unwrap();
    assert_eq!(d11.stated_bound, 1.0);
    assert!((d11.functional.constant() - (1.0 / SQRT_2 - 1.0)).abs() < 1e-15);
    assert_eq!(d11.functional.coefficient(Event::Joint { a: 0, x: 2, b: 0, y: 1 }), 2.0);
    for p in RankProfile::ALL {
        let d = build_derived(p, 3.0).unwrap();
        let lb = local_bound(&d.functional).unwrap();
        assert_eq!(lb.strategy, brute_force(&d.functional).strategy);
    }
    let d01 = build_derived(RankProfile::new(0, 1).unwrap(), 3.0).unwrap();
    assert!((local_bound(&d01.functional).unwrap().value - 1.0 / SQRT_2).abs() < 1e-12);
}

#[test]
fn i02_and_i20_relabel_into_each_other() {
    let d02 = build_derived(RankProfile::new(0, 2).unwrap(), 5.0).unwrap().functional;
    let d20 = build_derived(RankProfile::new(2, 0).unwrap(), 5.0).unwrap().functional;
    assert_eq!(local_bound(&d02).unwrap().value, local_bound(&d20).unwrap().value);
    // on psi+ with the CH-optimal settings both reduce to the CH value
    let (alice, bob) = ch_measurements();
    let mut alice = alice;
    alice.push(Povm::deterministic(2, 2, 0));
    let rho = psi_plus().density();
    let a = evaluate(&d02, &rho, &alice, &bob).unwrap();
    let b = evaluate(&d20, &rho, &alice, &bob).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn ich_quantum_value_on_psi_plus() {
    let (alice, bob) = ch_measurements();
    let v = evaluate(&build_ich(), &psi_plus().density(), &alice, &bob).unwrap();
    assert!((v - (SQRT_2 - 1.0) / 2.0).abs() < 1e-12);
}

#[test]
fn maximally_mixed_joints_factorize() {
    let (alice, bob) = ch_measurements();
    let rho = DensityMatrix::maximally_mixed(4);
    // −½ − ½ + ¼ + ¼ + ¼ − ¼
    let v = evaluate(&build_ich(), &rho, &alice, &bob).unwrap();
    assert!((v + 0.5).abs() < 1e-12);
}

#[test]
fn evaluate_shape_errors() {
    let (alice, bob) = ch_measurements();
    let rho = psi_plus().density();
    assert!(matches!(evaluate(&build_ich3(1.0).unwrap(), &rho, &alice, &bob), Err(Error::Shape(_))));
    let mut bad = alice.clone();
    bad[0] = Povm::deterministic(2, 3, 0);
    assert!(matches!(evaluate(&build_ich(), &rho, &bad, &bob), Err(Error::Shape(_))));
    let rho3 = DensityMatrix::maximally_mixed(6);
    assert!(matches!(evaluate(&build_ich(), &rho3, &alice, &bob), Err(Error::Dimension(_))));
}

#[test]
fn deterministic_realization_matches_algebra() {
    let f = build_ich3(2.5).unwrap();
    let rho = psi_plus().density();
    for a2 in 0..3 {
        for bits in 0..16u32 {
            let s = Strategy {
                alice: vec![(bits & 1) as usize, ((bits >> 1) & 1) as usize, a2],
                bob: vec![((bits >> 2) & 1) as usize, ((bits >> 3) & 1) as usize],
            };
            let (al, bo) = s.as_measurements(f.scenario(), 2, 2);
            let q = evaluate(&f, &rho, &al, &bo).unwrap();
            assert!((q - f.deterministic_value(&s)).abs() < 1e-12);
        }
    }
}

#[test]
fn effective_operators_on_setting_two_are_scaled_f() {
    // with Bob at the CH-optimal vectors, the x=2 operators of I_3 on psi+
    // are F0/(2√2) and F1/(2√2) up to the trace parts fixed by completeness
    let f = build_ich3(1.0).unwrap();
    let (mut alice, bob) = ch_measurements();
    alice.push(Povm::deterministic(2, 3, 2));
    let rho = psi_plus().density();
    let g = bell_operator(&f, &rho, &bob).unwrap();
    let f0 = HermitianOperator::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
    let f1 = HermitianOperator::from_real(2, &[1.0 - SQRT_2, 1.0, 1.0, 1.0 - SQRT_2]).unwrap();
    for (k, fk) in [f0, f1].iter().enumerate() {
        let d = g.operators[2][k].sub(&g.operators[2][2]).unwrap();
        let want = fk.scale(1.0 / (2.0 * SQRT_2));
        assert!((d.matrix() - want.matrix()).max_abs() < 1e-12, "k={k}");
    }
    assert!(g.operators[2][2].max_eigenvalue().unwrap().abs() < 1e-15);
    let v = g.value(&alice).unwrap();
    assert!((v - evaluate(&f, &rho, &alice, &bob).unwrap()).abs() < 1e-12);
}

#[test]
fn zero_functional_has_zero_operators() {
    let f = BellFunctional::zero(Scenario::new(vec![2, 3], vec![2]).unwrap());
    let bob = vec![Povm::from_bloch(BlochVector::new(0.0, 1.0, 0.0).unwrap())];
    let g = bell_operator(&f, &psi_plus().density(), &bob).unwrap();
    assert_eq!(g.constant, 0.0);
    for ops in &g.operators {
        for o in ops {
            assert_eq!(o.matrix().max_abs(), 0.0);
        }
    }
}

#[test]
fn full_operator_and_bob_side_agree_with_evaluate() {
    let f = build_ich3(3.0).unwrap();
    let (mut alice, bob) = ch_measurements();
    let m0 = bloch_projector(BlochVector::normalized(0.3, 0.1, 0.8).unwrap(), 0).unwrap().scale(0.6);
    let m1 = bloch_projector(BlochVector::normalized(-0.5, 0.0, 0.2).unwrap(), 0).unwrap().scale(0.3);
    alice.push(Povm::completed(vec![m0, m1]).unwrap());
    let psi = crate::quantum::pure_state(0.6);
    let rho = psi.density();
    let direct = evaluate(&f, &rho, &alice, &bob).unwrap();
    let bo = full_bell_operator(&f, &alice, &bob).unwrap();
    assert!((bo.expectation(psi.amplitudes()) - direct).abs() < 1e-12);
    let gb = bell_operator_bob(&f, &rho, &alice).unwrap();
    assert!((gb.value(&bob).unwrap() - direct).abs() < 1e-12);
}

#[test]
fn merge_and_sort() {
    let sc = Scenario::new(vec![2], vec![2]).unwrap();
    let f = BellFunctional::new(sc, 0.0, [Term::joint(1, 0, 1, 0, 1.0), Term::alice(0, 0, 2.0), Term::joint(1, 0, 1, 0, 0.5)])
        .unwrap();
    assert_eq!(f.terms().len(), 2);
    assert_eq!(f.terms()[0].event, Event::Alice { a: 0, x: 0 });
    assert_eq!(f.coefficient(Event::Joint { a: 1, x: 0, b: 1, y: 0 }), 1.5);
    assert!(!Scenario::new(vec![2], vec![2]).unwrap().lint().is_empty());
    assert!(Scenario::new(vec![2, 2], vec![2, 2]).unwrap().lint().is_empty());
}

#[test]
fn out_of_range_terms_rejected() {
    let sc = Scenario::new(vec![2, 2], vec![2, 2]).unwrap();
    assert!(matches!(BellFunctional::new(sc.clone(), 0.0, [Term::alice(2, 0, 1.0)]), Err(Error::Shape(_))));
    assert!(matches!(BellFunctional::new(sc, 0.0, [Term::joint(0, 0, 0, 2, 1.0)]), Err(Error::Shape(_))));
    assert!(Scenario::new(vec![], vec![2]).is_err());
    assert!(Scenario::new(vec![0], vec![2]).is_err());
}

#[test]
fn enumeration_cap() {
    let sc = Scenario::new(vec![10; 7], vec![2]).unwrap();
    let f = BellFunctional::zero(sc);
    assert!(matches!(local_bound(&f), Err(Error::EnumerationCap { .. })));
}

#[test]
fn shards_agree() {
    let f = build_derived(RankProfile::new(1, 1).unwrap(), 3.1).unwrap().functional;
    let whole = local_bound(&f).unwrap();
    for shards in 1..5 {
        let merged = (0..shards)
            .map(|s| local_bound_shard(&f, ENUMERATION_CAP, s, shards).unwrap())
            .reduce(LocalBound::merge)
            .unwrap();
        assert_eq!(merged, whole);
    }
}
