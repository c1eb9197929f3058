use band_rips::*;
use iis_core::systems::{build_system, SystemId};

/// Rounds and represented measure after step `n` of the sweep machine.
fn oracle(n: usize) -> (usize, f64) {
    let x = complex_from_iis(&build_system(SystemId::S1));
    let m = &pruning_mass_schedule(&x, n, Policy::Sweep)[n - 1];
    (m.rounds as usize, m.measure.to_f64())
}

#[test]
fn round_bounds_of_the_s1_sweep() {
    let x = complex_from_iis(&build_system(SystemId::S1));
    let sched = pruning_mass_schedule(&x, 23, Policy::Sweep);
    let at: Vec<u64> = [5, 11, 17, 23].iter().map(|&n| sched[n - 1].rounds).collect();
    assert_eq!(at, vec![5, 44, 311, 2141]);
    // nonincreasing measure
    assert!(sched.windows(2).all(|w| w[1].measure <= w[0].measure));
}

#[test]
fn estimates_follow_the_exact_bookkeeping() {
    let s = build_system(SystemId::S1);
    let rep = pruning_decay(&s, 2200, 1000);
    assert!(rep.is_monotone());
    assert!(rep.exhausted_fraction() < 0.1);
    let mut prev: Option<(f64, f64)> = None;
    for n in [11, 17, 23] {
        let (r, mass) = oracle(n);
        let est = rep.at(r);
        assert!((est - mass).abs() <= 0.2 * mass, "step {n}: estimate {est} vs measure {mass}");
        // ratio across one period (six steps)
        if let Some((e0, m0)) = prev {
            let (re, rm) = (est / e0, mass / m0);
            assert!((re - rm).abs() <= 0.2 * rm, "period ratio {re} vs {rm}");
        }
        prev = Some((est, mass));
    }
}

#[test]
fn support_alone_shrinks_by_the_contraction() {
    let x = complex_from_iis(&build_system(SystemId::S1));
    let rep = detect_rips_cycle(&x, 40, Policy::Sweep).unwrap();
    let (hist, _) = run_machine(&x, 17, Policy::Sweep);
    let (a, b, c) = (&hist[5], &hist[11], &hist[17]);
    assert_eq!(b.support_measure(), &a.support_measure() * &rep.contraction);
    assert_eq!(c.support_measure(), &b.support_measure() * &rep.contraction);
}
