use numberfield::FieldElement;
use serde::Serialize;

use crate::{rauzy_step, Iis, Move, Side};

/// Side schedule searched by [`detect_self_similarity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Policy {
    Fixed(Side),
    /// Alternates sides, starting with the given one.
    Alternating(Side),
    /// Breadth-first over all side sequences; returns a shortest period.
    Exhaustive,
}

/// `period` Rauzy steps turn the system into `contraction * S + translation`.
#[derive(Clone, Debug, Serialize)]
pub struct SimilarityReport {
    pub period: usize,
    pub sides: String,
    pub contraction: FieldElement,
    pub translation: FieldElement,
    pub move_log: Vec<Move>,
}

impl SimilarityReport {
    /// Replays the side schedule on `s` and checks the claimed affine image exactly.
    pub fn verify(&self, s: &Iis) -> bool {
        let mut cur = s.clone();
        for ch in self.sides.chars() {
            let side = if ch == 'L' { Side::Left } else { Side::Right };
            match rauzy_step(&cur, side) {
                Ok((n, _)) => cur = n,
                Err(_) => return false,
            }
        }
        cur.same_as(&s.affine(&self.contraction, &self.translation))
    }
}

fn similar(orig: &Iis, key: &[[[FieldElement; 2]; 2]], cur: &Iis) -> Option<(FieldElement, FieldElement)> {
    if cur.normalized() != key {
        return None;
    }
    let k = &cur.length() / &orig.length();
    let t = &cur.support.lo - &(&orig.support.lo * &k);
    Some((k, t))
}

/// Looks for `k <= max_steps` Rauzy steps under `policy` after which the
/// system is an affine image of itself. Equality is tested exactly after
/// normalizing the support to `[0, 1]` and sorting pairs.
pub fn detect_self_similarity(s: &Iis, max_steps: usize, policy: Policy) -> Option<SimilarityReport> {
    let key = s.normalized();
    match policy {
        Policy::Fixed(_) | Policy::Alternating(_) => {
            let mut cur = s.clone();
            let mut log = Vec::new();
            let mut sides = String::new();
            for k in 0..max_steps {
                let side = match policy {
                    Policy::Fixed(side) => side,
                    Policy::Alternating(first) => {
                        if k % 2 == 0 {
                            first
                        } else if first == Side::Left {
                            Side::Right
                        } else {
                            Side::Left
                        }
                    }
                    Policy::Exhaustive => unreachable!(),
                };
                let (next, moves) = rauzy_step(&cur, side).ok()?;
                log.extend(moves);
                sides.push(side.letter());
                cur = next;
                if let Some((contraction, translation)) = similar(s, &key, &cur) {
                    return Some(SimilarityReport { period: k + 1, sides, contraction, translation, move_log: log });
                }
            }
            None
        }
        Policy::Exhaustive => {
            let mut layer = vec![(s.clone(), String::new(), Vec::<Move>::new())];
            for _ in 0..max_steps {
                let mut next = Vec::new();
                for (sys, sides, log) in &layer {
                    for side in [Side::Left, Side::Right] {
                        let Ok((n, moves)) = rauzy_step(sys, side) else { continue };
                        let mut sd = sides.clone();
                        sd.push(side.letter());
                        let mut lg = log.clone();
                        lg.extend(moves);
                        if let Some((contraction, translation)) = similar(s, &key, &n) {
                            return Some(SimilarityReport {
                                period: sd.len(),
                                sides: sd,
                                contraction,
                                translation,
                                move_log: lg,
                            });
                        }
                        next.push((n, sd, lg));
                    }
                }
                layer = next;
            }
            None
        }
    }
}
