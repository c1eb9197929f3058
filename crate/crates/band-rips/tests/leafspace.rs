use std::collections::HashSet;

use band_rips::*;
use iis_core::systems::{build_system, SystemId};
use numberfield::{rat, FieldElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn surviving(y: &BandComplex, set: HashSet<FieldElement>) -> HashSet<FieldElement> {
    set.into_iter().filter(|v| y.arcs.iter().any(|a| a.lo.v < *v && *v < a.hi.v)).collect()
}

/// Orbit relations among points that survive a step are the same before and
/// after it: reduced paths never enter a collapsed subarc, and a merged band
/// stands for as many crossings as it has members.
#[test]
fn rips_steps_keep_orbit_relations() {
    let x0 = complex_from_iis(&build_system(SystemId::S1));
    let (hist, _) = run_machine(&x0, 6, Policy::Sweep);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let depth = 3;
    for w in hist.windows(2) {
        let (x, y) = (&w[0], &w[1]);
        let min_len = x.bands.iter().map(|b| b.length.clone()).min().unwrap();
        let m = y.bands.iter().map(|b| (&b.length / &min_len).ceil().to_integer()).max().unwrap();
        let m: usize = m.try_into().unwrap();
        for _ in 0..50 {
            let arc = &y.arcs[rng.gen_range(0..y.arcs.len())];
            let k: i64 = 2 * rng.gen_range(0..500) + 1;
            let p = &arc.lo.v + &(&arc.hi.v - &arc.lo.v).scale(&rat(k, 1000));
            let after = surviving(y, y.orbit(&p, depth));
            let before = surviving(y, x.orbit(&p, depth));
            assert!(before.is_subset(&after));
            assert!(after.is_subset(&surviving(y, x.orbit(&p, depth * m))));
        }
    }
}
