use band_rips::invariants::check_moves;
use iis_core::systems::field_lambda1;
use iis_core::{Iis, Interval, IntervalPair};
use numberfield::FieldHandle;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pair() -> impl Strategy<Value = (i64, i64, i64)> {
    (1i64..=10).prop_flat_map(|w| (Just(w), 0..=24 - w, 0..=24 - w))
}

fn build(pairs: &[(i64, i64, i64)]) -> Iis {
    let f = field_lambda1();
    let q = |n: i64| f.from_int(n);
    let pairs = pairs
        .iter()
        .map(|&(w, a, c)| IntervalPair::new(Interval::new(q(a), q(a + w)), Interval::new(q(c), q(c + w))))
        .collect();
    Iis::new(Interval::new(q(0), q(24)), pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn moves_keep_their_bookkeeping(pairs in prop::collection::vec(pair(), 1..=4), seed in any::<u64>(), depth in 1usize..=6) {
        let s = build(&pairs);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = check_moves(&s, &mut rng, depth);
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}
