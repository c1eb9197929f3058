use numberfield::{FieldElement, Rational};
use serde::Serialize;

use crate::complex::{find_free_subarcs, BandComplex, BaseSide, FreeSubarc};
use crate::RipsError;

/// Which free subarcs one iteration collapses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Every maximal free subarc present when the iteration starts, including
    /// the pieces they break into while being collapsed.
    #[default]
    Sweep,
    /// Only the first maximal free subarc (lowest arc, leftmost point).
    Leftmost,
}

impl Policy {
    pub fn parse(s: &str) -> Option<Policy> {
        match s {
            "sweep" => Some(Policy::Sweep),
            "leftmost" => Some(Policy::Leftmost),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapseRecord {
    pub arc: usize,
    pub lo: FieldElement,
    pub hi: FieldElement,
    /// `None` for a dead subarc.
    pub band: Option<usize>,
    pub side: Option<BaseSide>,
    /// Length of the band the subarc was pushed through.
    #[serde(serialize_with = "ser_rat_opt")]
    pub band_length: Option<Rational>,
}

fn ser_rat_opt<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&numberfield::rat_to_string(r)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StepLog {
    pub collapses: Vec<CollapseRecord>,
    pub merges: usize,
    pub dead_deleted: usize,
}

impl StepLog {
    /// Largest length among bands collapsed through in this iteration.
    pub fn max_collapsed_length(&self) -> Option<Rational> {
        self.collapses.iter().filter_map(|c| c.band_length.clone()).max()
    }
}

fn record(x: &BandComplex, fa: &FreeSubarc) -> CollapseRecord {
    let band = fa.base.map(|(id, _)| id);
    CollapseRecord {
        arc: fa.arc,
        lo: fa.lo.v.clone(),
        hi: fa.hi.v.clone(),
        band,
        side: fa.base.map(|(_, s)| s),
        band_length: band.and_then(|id| x.band_by_id(id)).map(|b| b.length.clone()),
    }
}

/// One iteration of the machine: collapses chosen by `policy`, then long-band
/// merging and deletion of dead subarcs.
pub fn rips_step(x: &BandComplex, policy: Policy) -> Result<(BandComplex, StepLog), RipsError> {
    let free = find_free_subarcs(x);
    if free.is_empty() {
        return Err(RipsError::Halted);
    }
    let mut y = x.clone();
    let mut log = StepLog::default();
    match policy {
        Policy::Leftmost => {
            log.collapses.push(record(&y, &free[0]));
            y.collapse_unchecked(&free[0]);
        }
        Policy::Sweep => {
            let snap: Vec<(FieldElement, FieldElement)> = free.iter().map(|f| (f.lo.v.clone(), f.hi.v.clone())).collect();
            while let Some(f) = find_free_subarcs(&y)
                .into_iter()
                .find(|f| snap.iter().any(|(s, t)| *s <= f.lo.v && f.hi.v <= *t))
            {
                log.collapses.push(record(&y, &f));
                y.collapse_unchecked(&f);
            }
        }
    }
    log.merges = y.merge_all();
    log.dead_deleted = y.delete_dead();
    Ok((y, log))
}

/// Runs up to `steps` iterations; stops early when the machine halts.
/// Returns all complexes (starting with `x`) and the per-step logs.
pub fn run_machine(x: &BandComplex, steps: usize, policy: Policy) -> (Vec<BandComplex>, Vec<StepLog>) {
    let mut hist = vec![x.clone()];
    let mut logs = Vec::new();
    for _ in 0..steps {
        match rips_step(hist.last().unwrap(), policy) {
            Ok((y, log)) => {
                hist.push(y);
                logs.push(log);
            }
            Err(_) => break,
        }
    }
    (hist, logs)
}
