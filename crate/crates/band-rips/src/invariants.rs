//! Bookkeeping checks for every move (transmission, reduction, collapse,
//! merge, a full machine step) on small random systems with rational data.

use std::collections::HashSet;
use std::sync::Arc;

use iis_core::{orbit_bfs, reduce, transmit, Iis, Interval, IntervalPair, Side, Slot};
use numberfield::{rat, FieldElement, FieldHandle, NumberField};
use rand::Rng;

use crate::complex::{collapse_free_subarc, complex_from_iis, find_free_subarcs, merge_long_bands, BandComplex};
use crate::machine::{rips_step, Policy};

/// Support `[0, 24]`, one to four pairs with integer endpoints.
pub fn random_system(rng: &mut impl Rng, field: &Arc<NumberField>) -> Iis {
    let q = |n: i64| field.from_int(n);
    let n = rng.gen_range(1..=4);
    let pairs = (0..n)
        .map(|_| {
            let w = rng.gen_range(1..=10);
            let a = rng.gen_range(0..=24 - w);
            let c = rng.gen_range(0..=24 - w);
            IntervalPair::new(Interval::new(q(a), q(a + w)), Interval::new(q(c), q(c + w)))
        })
        .collect();
    Iis::new(Interval::new(q(0), q(24)), pairs).expect("random system is valid")
}

/// Counts of the moves that were checked.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MoveCheck {
    pub transmissions: usize,
    pub reductions: usize,
    pub collapses: usize,
    pub merges: usize,
    pub steps: usize,
    pub orbit_checks: usize,
}

/// A point strictly inside `[lo, hi]` avoiding the integer grid.
fn inner_point(rng: &mut impl Rng, lo: &FieldElement, hi: &FieldElement) -> FieldElement {
    let mut k = 2 * rng.gen_range(0..97) + 1;
    if k == 97 {
        k = 95;
    }
    lo + &(hi - lo).scale(&rat(k, 194))
}

fn orbit(s: &Iis, x: &FieldElement, depth: usize) -> HashSet<FieldElement> {
    orbit_bfs(s, x, depth).expect("point in support").vertices.into_iter().map(|(v, _)| v).collect()
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Runs every check on `s`; orbit comparisons use depth `depth` (at most 6).
pub fn check_moves(s: &Iis, rng: &mut impl Rng, depth: usize) -> Result<MoveCheck, String> {
    let mut c = MoveCheck::default();
    let slots: Vec<Slot> = s.slots().collect();

    // transmission: widths kept, one slot moved, one old edge is at most two new ones
    for &moved in &slots {
        for &along in &slots {
            let Ok(t) = transmit(s, moved, along) else { continue };
            let t = t.system;
            c.transmissions += 1;
            for (i, (p, q)) in s.pairs.iter().zip(&t.pairs).enumerate() {
                ensure(p.width() == q.width(), || format!("transmit changed the width of pair {i}"))?;
            }
            let changed = slots.iter().filter(|&&sl| s.slot(sl) != t.slot(sl)).count();
            ensure(changed <= 1, || "transmit moved more than one interval".into())?;
            let x = inner_point(rng, &s.support.lo, &s.support.hi);
            ensure(orbit(s, &x, depth).is_subset(&orbit(&t, &x, 2 * depth)), || "transmit lost an orbit edge".into())?;
            ensure(orbit(&t, &x, depth).is_subset(&orbit(s, &x, 2 * depth)), || "transmit made a new orbit edge".into())?;
            c.orbit_checks += 2;
        }
    }

    // reduction: the cut comes out of one pair; orbits inside the new support are unchanged
    for side in [Side::Left, Side::Right] {
        let Ok((r, k)) = reduce(s, side) else { continue };
        c.reductions += 1;
        let lost = &s.length() - &r.length();
        ensure(lost.is_positive(), || "reduction did not shrink the support".into())?;
        ensure(&s.pairs[k].width() - &r.pairs[k].width() == lost, || "reduction width bookkeeping".into())?;
        for (i, (p, q)) in s.pairs.iter().zip(&r.pairs).enumerate() {
            ensure(i == k || p == q, || format!("reduction touched pair {i}"))?;
        }
        let x = inner_point(rng, &r.support.lo, &r.support.hi);
        let old: HashSet<FieldElement> =
            orbit(s, &x, depth).into_iter().filter(|v| r.support.lo < *v && *v < r.support.hi).collect();
        let new: HashSet<FieldElement> =
            orbit(&r, &x, depth).into_iter().filter(|v| r.support.lo < *v && *v < r.support.hi).collect();
        ensure(old == new, || "reduction changed an orbit".into())?;
        c.orbit_checks += 1;
    }

    // collapse and merge on the complex
    let x = complex_from_iis(s);
    let f = x.field().clone();
    for fa in find_free_subarcs(&x) {
        let y = collapse_free_subarc(&x, &fa).map_err(|e| format!("collapse of a listed subarc failed: {e}"))?;
        c.collapses += 1;
        y.check()?;
        let j = &fa.hi.v - &fa.lo.v;
        ensure(&x.support_measure() - &y.support_measure() == j, || "collapse support bookkeeping".into())?;
        let (dw, dm) = match fa.base {
            Some((id, _)) => {
                let l = x.band_by_id(id).expect("band").length.clone();
                (j.clone(), j.scale(&l))
            }
            None => (f.zero(), j.clone()),
        };
        ensure(&x.width_mass() - &y.width_mass() == dw, || "collapse width bookkeeping".into())?;
        ensure(&x.represented_measure() - &y.represented_measure() == dm, || "collapse measure bookkeeping".into())?;
        let z = merge_long_bands(&y);
        if z.arcs.len() < y.arcs.len() {
            c.merges += 1;
        }
        z.check()?;
        ensure(z.represented_measure() == y.represented_measure(), || "merge changed the represented measure".into())?;
        ensure(weighted_length(&z) == weighted_length(&y), || "merge changed total width times length".into())?;
    }

    // one machine step keeps orbit relations among surviving points
    if let Ok((y, _)) = rips_step(&x, Policy::Sweep) {
        c.steps += 1;
        y.check()?;
        if let Some(arc) = y.arcs.first() {
            let p = inner_point(rng, &arc.lo.v, &arc.hi.v);
            let d = depth.min(3);
            let inside = |set: HashSet<FieldElement>| -> HashSet<FieldElement> {
                set.into_iter().filter(|v| y.arcs.iter().any(|a| a.lo.v < *v && *v < a.hi.v)).collect()
            };
            let before = inside(x.orbit(&p, d));
            let after = inside(y.orbit(&p, d));
            ensure(before.is_subset(&after), || "rips step lost an orbit relation".into())?;
            let m: usize = y.bands.iter().map(|b| b.length.to_integer().try_into().unwrap_or(usize::MAX)).max().unwrap_or(1);
            if m * d <= 12 {
                ensure(after.is_subset(&inside(x.orbit(&p, m * d))), || "rips step made a new orbit relation".into())?;
            }
            c.orbit_checks += 1;
        }
    }
    Ok(c)
}

fn weighted_length(x: &BandComplex) -> FieldElement {
    x.bands.iter().fold(x.field().zero(), |acc, b| &acc + &b.width().scale(&b.length))
}
