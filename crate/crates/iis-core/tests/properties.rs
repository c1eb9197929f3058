use std::collections::HashSet;

use iis_core::systems::{build_system, field_lambda1, SystemId};
use iis_core::{
    detect_self_similarity, orbit_bfs, point_valence, rauzy_step, reduce, transmit, Iis, Member, MoveKind, Policy,
    Side, Slot,
};
use numberfield::{rat, FieldElement, FieldHandle};
use proptest::prelude::*;

fn point(s: &Iis, num: i64, den: i64) -> FieldElement {
    let t = s.field().from_rational(rat(num, den));
    &s.support.lo + &(&t * &s.length())
}

fn slice_set(s: &Iis, x: &FieldElement, depth: usize) -> HashSet<FieldElement> {
    orbit_bfs(s, x, depth).unwrap().vertices.into_iter().map(|(v, _)| v).collect()
}

#[test]
fn six_right_steps_scale_s1_exactly() {
    let s = build_system(SystemId::S1);
    let mut cur = s.clone();
    for _ in 0..6 {
        cur = rauzy_step(&cur, Side::Right).unwrap().0;
    }
    let l = field_lambda1().gen();
    let t = &cur.support.lo - &(&s.support.lo * &l);
    assert!(cur.same_as(&s.affine(&l, &t)));
}

#[test]
fn ten_right_steps_scale_s2_exactly() {
    let s = build_system(SystemId::S2);
    let r = detect_self_similarity(&s, 12, Policy::Fixed(Side::Right)).unwrap();
    assert_eq!(r.period, 10);
    assert!(r.verify(&s));
    assert_eq!(r.move_log.iter().filter(|m| m.kind == MoveKind::Transmit).count(), 10);
}

#[test]
fn similarity_is_independent_of_pair_order() {
    let mut s = build_system(SystemId::S1);
    s.pairs.reverse();
    let r = detect_self_similarity(&s, 12, Policy::Fixed(Side::Right)).unwrap();
    assert_eq!(r.period, 6);
}

/// Image under `x -> t - x`.
fn reflect(s: &Iis, t: &FieldElement) -> Iis {
    s.affine(&s.field().from_int(-1), t)
}

fn oriented(s: &Iis) -> Iis {
    // affine with a negative factor swaps interval ends; restore lo < hi
    let fix = |iv: &iis_core::Interval| iis_core::Interval::new(iv.hi.clone(), iv.lo.clone());
    let pairs = s.pairs.iter().map(|p| iis_core::IntervalPair::new(fix(&p.left), fix(&p.right))).collect();
    Iis::new(fix(&s.support), pairs).unwrap()
}

#[test]
fn left_and_right_steps_are_mirror_images_on_s1() {
    let s = build_system(SystemId::S1);
    let t = &s.support.lo + &s.support.hi;
    assert!(oriented(&reflect(&s, &t)).same_as(&s));
    let mut l = s.clone();
    let mut r = s.clone();
    for _ in 0..6 {
        l = rauzy_step(&l, Side::Left).unwrap().0;
        r = rauzy_step(&r, Side::Right).unwrap().0;
        assert!(oriented(&reflect(&l, &t)).same_as(&r));
    }
}

#[test]
fn documented_schedules_end_symmetric() {
    let s = build_system(SystemId::S1);
    for policy in [Policy::Fixed(Side::Right), Policy::Fixed(Side::Left), Policy::Exhaustive] {
        let r = detect_self_similarity(&s, 12, policy).unwrap();
        let mut cur = s.clone();
        for _ in 0..2 {
            for ch in r.sides.chars() {
                let side = if ch == 'L' { Side::Left } else { Side::Right };
                cur = rauzy_step(&cur, side).unwrap().0;
            }
            let v = cur.validate();
            assert!(v.symmetric && v.balanced, "{policy:?}");
        }
    }
}

#[test]
fn depth_zero_slice_is_the_root() {
    let s = build_system(SystemId::S1);
    let x = point(&s, 1, 3);
    let g = orbit_bfs(&s, &x, 0).unwrap();
    assert_eq!(g.vertices.len(), 1);
    assert!(g.edges.is_empty());
    assert_eq!(g.frontier, vec![0]);
}

#[test]
fn valence_by_membership_scan() {
    let s = build_system(SystemId::S1);
    let p = SystemId::S1.params();
    let (c, u) = (&p[2], &p[3]);
    let x = u + &c.scale(&rat(1, 2));
    let scan = s.slots().filter(|&sl| s.slot(sl).contains(&x)).count();
    assert_eq!(point_valence(&s, &x), scan);
    let g = orbit_bfs(&s, &x, 1).unwrap();
    assert_eq!(g.vertices.len() - 1, scan);
}

#[test]
fn json_round_trip() {
    for id in [SystemId::S1, SystemId::S2] {
        let s = build_system(id);
        let back = Iis::from_json(&s.to_json()).unwrap();
        assert_eq!(back.normalized(), s.normalized());
        assert_eq!(back.support.hi.approx_f64(), s.support.hi.approx_f64());
    }
}

#[test]
fn single_pair_covering_twice_is_balanced_iff_widths_sum() {
    let f = field_lambda1();
    let h = |n, d| f.from_rational(rat(n, d));
    let iv = |a, b| iis_core::Interval::new(a, b);
    let s = Iis::new(
        iv(h(0, 1), h(1, 1)),
        vec![iis_core::IntervalPair::new(iv(h(0, 1), h(1, 2)), iv(h(1, 2), h(1, 1)))],
    )
    .unwrap();
    assert!(!s.validate().balanced);
    let s = Iis::new(
        iv(h(0, 1), h(1, 1)),
        vec![iis_core::IntervalPair::new(iv(h(0, 1), h(1, 1)), iv(h(0, 1), h(1, 1)))],
    )
    .unwrap();
    assert!(s.validate().balanced);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn transmission_preserves_orbits(num in 0i64..=997, depth in 1usize..=6) {
        let s = build_system(SystemId::S1);
        let t = transmit(&s, Slot::new(1, Member::Right), Slot::new(0, Member::Right)).unwrap().system;
        let x = point(&s, num, 997);
        // one old edge is at most two new edges and vice versa
        let old = slice_set(&s, &x, depth);
        let new2 = slice_set(&t, &x, 2 * depth);
        prop_assert!(old.is_subset(&new2));
        let new = slice_set(&t, &x, depth);
        let old2 = slice_set(&s, &x, 2 * depth);
        prop_assert!(new.is_subset(&old2));
    }

    #[test]
    fn moves_preserve_widths(steps in 0usize..6, left in any::<bool>()) {
        let side = if left { Side::Left } else { Side::Right };
        let mut s = build_system(SystemId::S1);
        for _ in 0..steps {
            s = rauzy_step(&s, side).unwrap().0;
        }
        let at_end: Vec<Slot> = s.slots().filter(|&sl| match side {
            Side::Left => s.slot(sl).lo == s.support.lo,
            Side::Right => s.slot(sl).hi == s.support.hi,
        }).collect();
        let (w0, w1) = (s.slot(at_end[0]).width(), s.slot(at_end[1]).width());
        let (small, big) = if w0 < w1 { (at_end[0], at_end[1]) } else { (at_end[1], at_end[0]) };
        let t = transmit(&s, small, big).unwrap().system;
        for (p, q) in s.pairs.iter().zip(&t.pairs) {
            prop_assert_eq!(p.width(), q.width());
        }
        if let Ok((r, k)) = reduce(&t, side) {
            let lost = &t.length() - &r.length();
            prop_assert_eq!(&t.pairs[k].width() - &r.pairs[k].width(), lost);
            for (i, (p, q)) in t.pairs.iter().zip(&r.pairs).enumerate() {
                if i != k {
                    prop_assert_eq!(p, q);
                }
            }
        }
    }

    #[test]
    fn slices_grow_and_edges_reverify(num in 0i64..=501, depth in 0usize..5) {
        let s = build_system(SystemId::S2);
        let x = point(&s, num, 501);
        let a = orbit_bfs(&s, &x, depth).unwrap();
        let b = orbit_bfs(&s, &x, depth + 1).unwrap();
        let sa: HashSet<_> = a.vertices.iter().map(|(v, _)| v.clone()).collect();
        let sb: HashSet<_> = b.vertices.iter().map(|(v, _)| v.clone()).collect();
        prop_assert!(sa.is_subset(&sb));
        for &(i, j, k) in &b.edges {
            let (p, q) = (&b.vertices[i].0, &b.vertices[j].0);
            let pr = &s.pairs[k];
            prop_assert!(pr.left.contains(p) && pr.right.contains(q));
            prop_assert_eq!(&(p + &pr.shift()), q);
        }
    }
}
