//! Band complexes built from interval identification systems, the Rips
//! machine (collapse from a free subarc plus long-band merging), detection of
//! self-similar cycles with exact width and length transition matrices, the
//! one-end criterion, and a Monte Carlo leaf-pruning experiment.

mod complex;
mod cycle;
mod machine;
mod prune;
mod svg;
pub mod reference;
mod error;
pub mod invariants;

pub use complex::{
    collapse_free_subarc, complex_from_iis, find_free_subarcs, merge_long_bands, Band, BandComplex, Base, BaseSide,
    Canonical, FreeSubarc, Pt, SupportArc,
};
pub use error::RipsError;
pub use cycle::{
    detect_rips_cycle, formalize, generic_chart, one_end_criterion, track, BandSelector, Chart, CycleReport,
    EndCriterion, Functional, Transition,
};
pub use machine::{rips_step, run_machine, CollapseRecord, Policy, StepLog};
pub use prune::{pruning_decay, pruning_decay_with, pruning_mass_schedule, MassPoint, PruneConfig, PruningReport};
pub use svg::to_svg;
