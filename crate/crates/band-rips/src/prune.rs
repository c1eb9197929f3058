//! Iterated leaf removal on the orbit graphs of an interval identification
//! system, estimated by sampling points of the support.
//!
//! A vertex of a tree is removed in round `h2 + 1`, where `h2` is the second
//! largest depth among the branches hanging at it (0 with fewer than two
//! branches). Depths are explored depth-first up to the number of rounds, so
//! the status of every sampled point after `r <= rounds` rounds is decided
//! exactly, unless the exploration budget runs out first.

use iis_core::Iis;
use numberfield::{FieldElement, Rational};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::machine::{rips_step, Policy};
use crate::BandComplex;

#[derive(Clone, Debug)]
pub struct PruneConfig {
    pub rounds: usize,
    pub samples: usize,
    pub seed: u64,
    /// Vertices a single sample may visit before it is reported as exhausted.
    pub budget: u64,
    pub threads: usize,
}

impl PruneConfig {
    pub fn new(rounds: usize, samples: usize) -> PruneConfig {
        PruneConfig {
            rounds,
            samples,
            seed: 0x5eed_1e4f,
            budget: 20_000_000,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PruningReport {
    pub rounds: usize,
    pub samples: usize,
    pub seed: u64,
    /// Samples whose exploration ran out of budget (DepthExhausted); excluded below.
    pub exhausted: usize,
    /// `estimates[r - 1]`: fraction of decided samples surviving `r` rounds.
    pub estimates: Vec<f64>,
    /// Largest number of vertices any decided sample visited.
    pub max_visited: u64,
}

impl PruningReport {
    pub fn at(&self, r: usize) -> f64 {
        self.estimates[r - 1]
    }

    pub fn exhausted_fraction(&self) -> f64 {
        self.exhausted as f64 / self.samples as f64
    }

    pub fn is_monotone(&self) -> bool {
        self.estimates.windows(2).all(|w| w[1] <= w[0])
    }
}

struct Side {
    lo: f64,
    hi: f64,
    lo_x: FieldElement,
    hi_x: FieldElement,
}

/// Float copy of the system with exact data kept for close calls.
struct Graph {
    sides: Vec<[Side; 2]>,
    shift: Vec<f64>,
    shift_x: Vec<FieldElement>,
}

impl Graph {
    fn new(s: &Iis) -> Graph {
        let side = |iv: &iis_core::Interval| Side {
            lo: iv.lo.to_f64(),
            hi: iv.hi.to_f64(),
            lo_x: iv.lo.clone(),
            hi_x: iv.hi.clone(),
        };
        Graph {
            sides: s.pairs.iter().map(|p| [side(&p.left), side(&p.right)]).collect(),
            shift: s.pairs.iter().map(|p| p.shift().to_f64()).collect(),
            shift_x: s.pairs.iter().map(|p| p.shift()).collect(),
        }
    }
}

/// A vertex: the sampled point plus integer multiples of the pair shifts.
struct Walker<'a> {
    g: &'a Graph,
    x: f64,
    x_exact: FieldElement,
    counts: Vec<i64>,
    visited: u64,
}

const MARGIN: f64 = 1e-11;

impl Walker<'_> {
    fn pos(&self) -> (f64, f64) {
        let mut p = self.x;
        let mut mag = self.x.abs();
        for (n, t) in self.counts.iter().zip(&self.g.shift) {
            p += *n as f64 * t;
            mag += (*n as f64 * t).abs();
        }
        (p, mag)
    }

    fn exact(&self) -> FieldElement {
        let mut p = self.x_exact.clone();
        for (n, t) in self.counts.iter().zip(&self.g.shift_x) {
            if *n != 0 {
                p = &p + &t.scale(&Rational::from_integer((*n).into()));
            }
        }
        p
    }

    /// Bit `2i` for moving along pair `i`, bit `2i + 1` for moving back.
    fn moves(&self) -> u64 {
        let (p, mag) = self.pos();
        let tol = MARGIN * (1.0 + mag);
        let mut exact: Option<FieldElement> = None;
        let mut m = 0u64;
        for (i, pair) in self.g.sides.iter().enumerate() {
            for (k, s) in pair.iter().enumerate() {
                let inside = if p > s.lo + tol && p < s.hi - tol {
                    true
                } else if p < s.lo - tol || p > s.hi + tol {
                    false
                } else {
                    let e = exact.get_or_insert_with(|| self.exact());
                    s.lo_x <= *e && *e <= s.hi_x
                };
                if inside {
                    m |= 1 << (2 * i + k);
                }
            }
        }
        m
    }

    fn apply(&mut self, bit: u32, sign: i64) {
        let i = (bit / 2) as usize;
        // left member moves by +shift, right member by -shift
        let dir = if bit % 2 == 0 { 1 } else { -1 };
        self.counts[i] += sign * dir;
    }

    /// Depth of the branch entered by `bit`, capped at `cap`; `None` when out of budget.
    fn branch_depth(&mut self, bit: u32, cap: usize, budget: u64) -> Option<usize> {
        // stack of (bit used to arrive, remaining moves)
        let mut stack: Vec<(u32, u64)> = Vec::new();
        self.apply(bit, 1);
        self.visited += 1;
        let mut best = 1;
        if cap > 1 {
            let m = self.moves() & !(1 << (bit ^ 1));
            stack.push((bit, m));
        } else {
            self.apply(bit, -1);
            return Some(1);
        }
        while let Some(top) = stack.last_mut() {
            if top.1 == 0 {
                let (b, _) = stack.pop().unwrap();
                self.apply(b, -1);
                continue;
            }
            let next = top.1.trailing_zeros();
            top.1 &= top.1 - 1;
            self.apply(next, 1);
            self.visited += 1;
            if self.visited > budget {
                while let Some((b, _)) = stack.pop() {
                    self.apply(b, -1);
                }
                self.apply(next, -1);
                return None;
            }
            let depth = stack.len() + 1;
            best = best.max(depth);
            if best >= cap {
                self.apply(next, -1);
                while let Some((b, _)) = stack.pop() {
                    self.apply(b, -1);
                }
                return Some(cap);
            }
            let m = self.moves() & !(1 << (next ^ 1));
            stack.push((next, m));
        }
        Some(best)
    }
}

/// Round in which the vertex of `x` is removed, or `cap + 1` if it survives `cap` rounds.
fn removal_round(w: &mut Walker, cap: usize, budget: u64) -> Option<usize> {
    let mut m = w.moves();
    let mut depths = Vec::new();
    while m != 0 {
        let bit = m.trailing_zeros();
        m &= m - 1;
        depths.push(w.branch_depth(bit, cap, budget)?);
        if depths.iter().filter(|&&d| d >= cap).count() >= 2 {
            return Some(cap + 1);
        }
    }
    depths.sort_unstable_by(|a, b| b.cmp(a));
    Some(depths.get(1).copied().unwrap_or(0) + 1)
}

fn sample(g: &Graph, s: &Iis, cfg: &PruneConfig, i: usize) -> (Option<usize>, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(i as u64);
    // midpoint of a random cell of width 2^-53, never an endpoint of the support
    let k: u64 = rng.gen::<u64>() >> 11;
    let t = Rational::new((2 * k + 1).into(), (1u64 << 54).into());
    let x_exact = &s.support.lo + &s.length().scale(&t);
    let mut w = Walker { g, x: x_exact.to_f64(), x_exact, counts: vec![0; s.pairs.len()], visited: 0 };
    let r = removal_round(&mut w, cfg.rounds, cfg.budget);
    (r, w.visited)
}

/// Estimated fraction of the support surviving `r` rounds of leaf removal,
/// for `r = 1..=rounds`, from uniformly sampled points.
pub fn pruning_decay(s: &Iis, rounds: usize, samples: usize) -> PruningReport {
    pruning_decay_with(s, &PruneConfig::new(rounds, samples))
}

pub fn pruning_decay_with(s: &Iis, cfg: &PruneConfig) -> PruningReport {
    assert!(cfg.rounds >= 1 && cfg.samples >= 1, "pruning needs rounds >= 1 and samples >= 1");
    assert!(s.pairs.len() <= 32, "at most 32 pairs");
    let g = Graph::new(s);
    let threads = cfg.threads.clamp(1, cfg.samples);
    let mut results: Vec<(Option<usize>, u64)> = vec![(None, 0); cfg.samples];
    std::thread::scope(|sc| {
        let chunk = cfg.samples.div_ceil(threads);
        for (c, out) in results.chunks_mut(chunk).enumerate() {
            let g = &g;
            sc.spawn(move || {
                for (j, slot) in out.iter_mut().enumerate() {
                    *slot = sample(g, s, cfg, c * chunk + j);
                }
            });
        }
    });
    let decided: Vec<usize> = results.iter().filter_map(|r| r.0).collect();
    let n = decided.len().max(1) as f64;
    // survivors[r] = number removed strictly after round r
    let mut removed_at = vec![0usize; cfg.rounds + 2];
    for &r in &decided {
        removed_at[r.min(cfg.rounds + 1)] += 1;
    }
    let mut estimates = Vec::with_capacity(cfg.rounds);
    let mut alive = decided.len();
    for r in 1..=cfg.rounds {
        alive -= removed_at[r];
        estimates.push(alive as f64 / n);
    }
    PruningReport {
        rounds: cfg.rounds,
        samples: cfg.samples,
        seed: cfg.seed,
        exhausted: results.len() - decided.len(),
        estimates,
        max_visited: results.iter().filter(|r| r.0.is_some()).map(|r| r.1).max().unwrap_or(0),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MassPoint {
    pub step: usize,
    /// Rounds of leaf removal accounted for by the collapses so far.
    pub rounds: u64,
    pub measure: FieldElement,
}

/// Exact bookkeeping along the machine: after each step, the number of
/// pruning rounds its collapses stand for (each step adds the longest band
/// it collapsed through) and the represented measure, normalised by the
/// initial support.
pub fn pruning_mass_schedule(x: &BandComplex, steps: usize, policy: Policy) -> Vec<MassPoint> {
    let total = x.support_measure();
    let mut cur = x.clone();
    let mut rounds = 0u64;
    let mut out = Vec::new();
    for step in 1..=steps {
        let Ok((y, log)) = rips_step(&cur, policy) else { break };
        if let Some(l) = log.max_collapsed_length() {
            rounds += l.ceil().to_integer().to_u64().unwrap_or(u64::MAX);
        }
        let measure = &y.represented_measure() / &total;
        out.push(MassPoint { step, rounds, measure });
        cur = y;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use iis_core::systems::{build_system, field_lambda1, SystemId};
    use iis_core::{Interval, IntervalPair};
    use numberfield::{rat, FieldHandle};

    #[test]
    fn rotation_never_prunes() {
        // one pair covering the whole support twice: every vertex has two branches
        let f = field_lambda1();
        let l = f.gen();
        let iv = |a: FieldElement, b: FieldElement| Interval::new(a, b);
        let one = f.one();
        let s = Iis::new(iv(f.zero(), &one + &one), vec![
            IntervalPair::new(iv(f.zero(), one.clone()), iv(one.clone(), &one + &one)),
            IntervalPair::new(iv(f.zero(), &one - &l), iv(l.clone(), one.clone())),
            IntervalPair::new(iv(one.clone(), &(&one + &one) - &l), iv(&one + &l, &one + &one)),
        ])
        .unwrap();
        let rep = pruning_decay(&s, 50, 40);
        assert_eq!(rep.exhausted, 0);
        assert!(rep.estimates.iter().all(|&e| e == 1.0), "{:?}", &rep.estimates[..5]);
    }

    #[test]
    fn estimates_are_monotone_and_deterministic() {
        let s = build_system(SystemId::S1);
        let a = pruning_decay(&s, 60, 200);
        let mut cfg = PruneConfig::new(60, 200);
        cfg.threads = 1;
        let b = pruning_decay_with(&s, &cfg);
        assert!(a.is_monotone());
        assert_eq!(a.estimates, b.estimates);
        assert!(a.at(1) < 1.0);
    }

    #[test]
    fn leaves_go_in_the_first_round() {
        // x in [0, 1/4] has a single neighbour and nothing else
        let f = field_lambda1();
        let h = |n, d| f.from_rational(rat(n, d));
        let iv = |a, b| Interval::new(a, b);
        let s = Iis::new(iv(h(0, 1), h(1, 1)), vec![IntervalPair::new(iv(h(0, 1), h(1, 4)), iv(h(3, 4), h(1, 1)))])
            .unwrap();
        let rep = pruning_decay(&s, 3, 100);
        assert_eq!(rep.estimates, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn tiny_budget_exhausts() {
        let s = build_system(SystemId::S1);
        let mut cfg = PruneConfig::new(500, 20);
        cfg.budget = 3;
        let rep = pruning_decay_with(&s, &cfg);
        assert!(rep.exhausted > 0);
    }
}
