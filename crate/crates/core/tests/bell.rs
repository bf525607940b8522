use bellforge_core::bell::{build_derived, build_ich, build_ich3, evaluate, local_bound, BellFunctional, RankProfile, Scenario, Term};
use bellforge_core::quantum::random::{random_pure_state, random_rank_one_povm, stream_rng};
use bellforge_core::quantum::Povm;
use proptest::prelude::*;
use rand::Rng;

fn random_functional(seed: u64) -> BellFunctional {
    let sc = Scenario::new(vec![2, 3], vec![2, 2]).unwrap();
    let mut rng = stream_rng(seed, 0);
    let mut terms = Vec::new();
    for x in 0..2 {
        for a in 0..[2, 3][x] {
            terms.push(Term::alice(a, x, rng.random_range(-1.0..1.0)));
            for y in 0..2 {
                for b in 0..2 {
                    terms.push(Term::joint(a, x, b, y, rng.random_range(-1.0..1.0)));
                }
            }
        }
    }
    for y in 0..2 {
        terms.push(Term::bob(0, y, rng.random_range(-1.0..1.0)));
    }
    BellFunctional::new(sc, rng.random_range(-1.0..1.0), terms).unwrap()
}

proptest! {
    #[test]
    fn local_bound_is_relabeling_invariant(seed in any::<u64>()) {
        let f = random_functional(seed);
        let base = local_bound(&f).unwrap().value;
        let g = f.relabel_alice(1, &[2, 0, 1]).unwrap().relabel_bob(0, &[1, 0]).unwrap();
        prop_assert!((local_bound(&g).unwrap().value - base).abs() < 1e-12);
    }

    #[test]
    fn local_bound_is_subadditive(s1 in any::<u64>(), s2 in any::<u64>()) {
        let f = random_functional(s1);
        let g = random_functional(s2);
        let sum = local_bound(&f.plus(&g).unwrap()).unwrap().value;
        prop_assert!(sum <= local_bound(&f).unwrap().value + local_bound(&g).unwrap().value + 1e-12);
    }

    #[test]
    fn evaluation_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), k in -5.0f64..5.0) {
        let f = random_functional(s1);
        let g = random_functional(s2);
        let mut rng = stream_rng(s1 ^ s2, 1);
        let rho = random_pure_state(&mut rng, 4, false).density();
        let alice = vec![random_rank_one_povm(&mut rng, 2, 2, false).unwrap(), random_rank_one_povm(&mut rng, 2, 3, false).unwrap()];
        let bob: Vec<Povm> = (0..2).map(|_| random_rank_one_povm(&mut rng, 2, 2, false).unwrap()).collect();
        let combo = f.plus(&g.scaled(k)).unwrap();
        let lhs = evaluate(&combo, &rho, &alice, &bob).unwrap();
        let rhs = evaluate(&f, &rho, &alice, &bob).unwrap() + k * evaluate(&g, &rho, &alice, &bob).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-11);
    }

    #[test]
    fn functional_json_round_trip_is_bit_exact(seed in any::<u64>()) {
        let f = random_functional(seed);
        let back: BellFunctional = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        prop_assert_eq!(back.constant().to_bits(), f.constant().to_bits());
        for (a, b) in back.terms().iter().zip(f.terms()) {
            prop_assert_eq!(a.coeff.to_bits(), b.coeff.to_bits());
            prop_assert_eq!(a.event, b.event);
        }
    }
}

#[test]
fn builders_round_trip() {
    let mut fs = vec![build_ich(), build_ich3(100.0).unwrap()];
    fs.extend(RankProfile::ALL.iter().map(|&p| build_derived(p, 3.1).unwrap().functional));
    for f in fs {
        let back: BellFunctional = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
