use bellforge_core::bell::{build_derived, build_ich3, local_bound, RankProfile};
use bellforge_core::optimize::{npa_upper_bound, seesaw, seesaw_run, MeasurementClass, SeesawConfig, StateMode};

#[test]
fn histories_are_monotone() {
    for c in [0.5, 3.1, 100.0] {
        let f = build_ich3(c).unwrap();
        for povm in [false, true] {
            let mut cfg = SeesawConfig::rank_one(&f, (2, 2), StateMode::Free);
            if povm {
                cfg.alice[2] = MeasurementClass::Povm;
            }
            cfg.seed = 17;
            for i in 0..5 {
                let r = seesaw_run(&f, &cfg, i).unwrap();
                assert!(r.history.windows(2).all(|w| w[1] >= w[0]), "c={c} povm={povm} run {i}");
            }
        }
    }
}

#[test]
fn local_below_seesaw_below_npa() {
    for c in [3.1, 100.0] {
        for p in RankProfile::ALL {
            let d = build_derived(p, c).unwrap();
            let lhv = local_bound(&d.functional).unwrap();
            let mut cfg = SeesawConfig::new(
                (2, 2),
                vec![MeasurementClass::Projective; 3],
                vec![MeasurementClass::Projective; 2],
                StateMode::Free,
            );
            cfg.restarts = 10;
            cfg.starts.push(lhv.strategy.as_measurements(d.functional.scenario(), 2, 2));
            let q = seesaw(&d.functional, &cfg).unwrap();
            let npa = npa_upper_bound(&d.functional, 1, 1e-9).unwrap();
            assert!(lhv.value <= q.value + 1e-9, "{} c={c}", p.label());
            assert!(q.value <= npa.value + 1e-6, "{} c={c}: {} > {}", p.label(), q.value, npa.value);
        }
    }
}
