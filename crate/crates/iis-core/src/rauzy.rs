use serde::{Deserialize, Serialize};

use crate::{Iis, IisError, Interval, Side, Slot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Transmit,
    Reduce,
}

/// One logged move. `pair` is the transmitted pair, or the reduced one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    #[serde(rename = "move")]
    pub kind: MoveKind,
    pub side: Side,
    pub pair: usize,
}

/// Output of [`transmit`] with the admissibility flags of the move.
#[derive(Clone, Debug)]
pub struct Transmission {
    pub system: Iis,
    pub admissible_left: bool,
    pub admissible_right: bool,
}

/// Replaces the interval at `moved` by its image under the isometry of the
/// pair holding `along`: `J - c + a`, where `[c, d]` is the interval at
/// `along` and `[a, b]` its partner. Requires `J` inside `[c, d]`.
pub fn transmit(s: &Iis, moved: Slot, along: Slot) -> Result<Transmission, IisError> {
    if moved.pair == along.pair {
        return Err(IisError::SelfTransmission);
    }
    let host = s.slot(along).clone();
    let j = s.slot(moved).clone();
    if !host.contains_interval(&j) {
        return Err(IisError::NotContained);
    }
    let partner = s.pairs[along.pair].get(along.member.other());
    let t = &partner.lo - &host.lo;
    let mut pairs = s.pairs.clone();
    *pairs[moved.pair].get_mut(moved.member) = j.shift(&t);
    Ok(Transmission {
        system: Iis::from_parts(s.support.clone(), pairs),
        admissible_left: host.lo == s.support.lo,
        admissible_right: host.hi == s.support.hi,
    })
}

/// Slots whose closed interval contains the support end on `side`.
fn covering(s: &Iis, side: Side) -> Vec<Slot> {
    let end = match side {
        Side::Left => &s.support.lo,
        Side::Right => &s.support.hi,
    };
    s.slots().filter(|&sl| s.slot(sl).contains(end)).collect()
}

/// Cuts off the part of the support covered by a single interval.
///
/// On the right: exactly one interval `[c, d]` may touch `B` (any other
/// coverage, even by a closed endpoint, blocks the move), and some critical
/// point must lie strictly inside `(c, B)`. With `u` the rightmost such
/// point, the pair becomes `[a, b - d + u] <-> [c, u]` and the support `[A, u]`.
pub fn reduce(s: &Iis, side: Side) -> Result<(Iis, usize), IisError> {
    let cov = covering(s, side);
    if cov.len() != 1 {
        return Err(IisError::PreconditionFailed(format!(
            "the {} end is covered by {} intervals",
            side.name(),
            cov.len()
        )));
    }
    let sl = cov[0];
    let iv = s.slot(sl).clone();
    let cps = s.critical_points();
    let mut pairs = s.pairs.clone();
    match side {
        Side::Right => {
            let u = cps
                .iter()
                .rev()
                .find(|x| **x < iv.hi && **x > iv.lo)
                .cloned()
                .ok_or_else(|| IisError::PreconditionFailed("no critical point inside the covering interval".into()))?;
            let cut = &iv.hi - &u;
            let p = &mut pairs[sl.pair];
            let other = p.get(sl.member.other()).clone();
            *p.get_mut(sl.member) = Interval::new(iv.lo.clone(), u.clone());
            *p.get_mut(sl.member.other()) = Interval::new(other.lo.clone(), &other.hi - &cut);
            Ok((Iis::from_parts(Interval::new(s.support.lo.clone(), u), pairs), sl.pair))
        }
        Side::Left => {
            let v = cps
                .iter()
                .find(|x| **x > iv.lo && **x < iv.hi)
                .cloned()
                .ok_or_else(|| IisError::PreconditionFailed("no critical point inside the covering interval".into()))?;
            let cut = &v - &iv.lo;
            let p = &mut pairs[sl.pair];
            let other = p.get(sl.member.other()).clone();
            *p.get_mut(sl.member) = Interval::new(v.clone(), iv.hi.clone());
            *p.get_mut(sl.member.other()) = Interval::new(&other.lo + &cut, other.hi.clone());
            Ok((Iis::from_parts(Interval::new(v, s.support.hi.clone()), pairs), sl.pair))
        }
    }
}

/// One step of the Rauzy induction on `side`: the two intervals sharing the
/// support end, the narrower is transmitted along the wider one's pair, then
/// a reduction on the same side follows when its precondition holds.
pub fn rauzy_step(s: &Iis, side: Side) -> Result<(Iis, Vec<Move>), IisError> {
    let at_end: Vec<Slot> = s
        .slots()
        .filter(|&sl| match side {
            Side::Left => s.slot(sl).lo == s.support.lo,
            Side::Right => s.slot(sl).hi == s.support.hi,
        })
        .collect();
    if at_end.len() != 2 || at_end[0].pair == at_end[1].pair {
        return Err(IisError::NoAdmissibleMove(side.name()));
    }
    let (w0, w1) = (s.slot(at_end[0]).width(), s.slot(at_end[1]).width());
    let (small, big) = match w0.cmp(&w1) {
        std::cmp::Ordering::Less => (at_end[0], at_end[1]),
        std::cmp::Ordering::Greater => (at_end[1], at_end[0]),
        std::cmp::Ordering::Equal => return Err(IisError::AmbiguousMove(side.name())),
    };
    let t = transmit(s, small, big)?;
    let mut log = vec![Move { kind: MoveKind::Transmit, side, pair: small.pair }];
    let out = match reduce(&t.system, side) {
        Ok((r, pair)) => {
            log.push(Move { kind: MoveKind::Reduce, side, pair });
            r
        }
        Err(IisError::PreconditionFailed(_)) => t.system,
        Err(e) => return Err(e),
    };
    Ok((out, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{build_system, SystemId};
    use crate::Member;
    use numberfield::FieldHandle;

    #[test]
    fn transmission_of_the_second_right_interval() {
        let s = build_system(SystemId::S1);
        let p = SystemId::S1.params();
        let (a, b) = (&p[0], &p[1]);
        let t = transmit(&s, Slot::new(1, Member::Right), Slot::new(0, Member::Right)).unwrap();
        assert!(t.admissible_right && !t.admissible_left);
        let iv = &t.system.pairs[1].right;
        assert_eq!(iv.lo, a - b);
        assert_eq!(&iv.hi, a);
        assert!((iv.lo.to_f64() - 0.190).abs() < 5e-4);
        // widths unchanged
        for (x, y) in s.pairs.iter().zip(&t.system.pairs) {
            assert_eq!(x.width(), y.width());
        }
    }

    #[test]
    fn reduction_after_transmission() {
        let s = build_system(SystemId::S1);
        let p = SystemId::S1.params();
        let (a, b, c, u) = (&p[0], &p[1], &p[2], &p[3]);
        let t = transmit(&s, Slot::new(1, Member::Right), Slot::new(0, Member::Right)).unwrap();
        let (r, pair) = reduce(&t.system, Side::Right).unwrap();
        assert_eq!(pair, 0);
        let top = &(&(a + b) + c) - u;
        assert_eq!(r.support.hi, top);
        // a + b + c = 1, so the new support ends at 1 - u
        assert!((top.to_f64() - 0.7074960).abs() < 1e-6);
        assert_eq!(r.pairs[0].left.hi, a - u);
        assert_eq!(r.pairs[0].right.lo, b + c);
        // only pair 0 changed; the support shrank by the same amount as the pair
        assert_eq!(r.pairs[1], t.system.pairs[1]);
        assert_eq!(r.pairs[2], t.system.pairs[2]);
        assert_eq!(&s.length() - &r.length(), &s.pairs[0].width() - &r.pairs[0].width());
    }

    #[test]
    fn rauzy_step_composes_transmit_and_reduce() {
        let s = build_system(SystemId::S1);
        let (r, log) = rauzy_step(&s, Side::Right).unwrap();
        assert_eq!(log.len(), 2);
        assert_eq!(log[0], Move { kind: MoveKind::Transmit, side: Side::Right, pair: 1 });
        assert_eq!(log[1], Move { kind: MoveKind::Reduce, side: Side::Right, pair: 0 });
        let t = transmit(&s, Slot::new(1, Member::Right), Slot::new(0, Member::Right)).unwrap();
        assert!(r.same_as(&reduce(&t.system, Side::Right).unwrap().0));
    }

    #[test]
    fn doubly_covered_end_blocks_reduction() {
        let s = build_system(SystemId::S1);
        assert!(matches!(reduce(&s, Side::Right), Err(IisError::PreconditionFailed(_))));
    }

    #[test]
    fn self_and_uncontained_transmissions_fail() {
        let s = build_system(SystemId::S1);
        assert_eq!(
            transmit(&s, Slot::new(0, Member::Left), Slot::new(0, Member::Right)).unwrap_err(),
            IisError::SelfTransmission
        );
        assert_eq!(
            transmit(&s, Slot::new(0, Member::Right), Slot::new(1, Member::Right)).unwrap_err(),
            IisError::NotContained
        );
    }

    #[test]
    fn transmitting_onto_itself_gives_partner() {
        let f = crate::systems::field_lambda1();
        let h = |n, d| f.from_rational(numberfield::rat(n, d));
        let iv = |a: (i64, i64), b: (i64, i64)| Interval::new(h(a.0, a.1), h(b.0, b.1));
        let s = Iis::new(
            iv((0, 1), (1, 1)),
            vec![
                crate::IntervalPair::new(iv((0, 1), (1, 2)), iv((1, 2), (1, 1))),
                crate::IntervalPair::new(iv((1, 2), (1, 1)), iv((1, 4), (3, 4))),
            ],
        )
        .unwrap();
        let t = transmit(&s, Slot::new(1, Member::Left), Slot::new(0, Member::Right)).unwrap();
        assert_eq!(t.system.pairs[1].left, s.pairs[0].left);
    }

    #[test]
    fn equal_widths_are_ambiguous() {
        let f = crate::systems::field_lambda1();
        let h = |n, d| f.from_rational(numberfield::rat(n, d));
        // a = b: the two intervals at the right end have the same width
        let s = crate::systems::three_pair_system(&h(2, 5), &h(2, 5), &h(1, 5), &h(1, 10), &h(1, 2)).unwrap();
        assert_eq!(rauzy_step(&s, Side::Right).unwrap_err(), IisError::AmbiguousMove("right"));
    }

    #[test]
    fn move_json() {
        let m = Move { kind: MoveKind::Transmit, side: Side::Right, pair: 1 };
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"move":"transmit","side":"right","pair":1}"#);
    }
}
