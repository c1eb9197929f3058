//! Interval identification systems of order `n`: a support interval and `n`
//! width-matched pairs of subintervals glued by translations. Provides the
//! moves of the Rauzy induction (transmission, reduction), self-similarity
//! detection, and bounded orbit-graph exploration. All points are exact.

mod error;
mod orbit;
mod rauzy;
mod similarity;
mod system;
pub mod systems;

pub use error::IisError;
pub use orbit::{orbit_bfs, point_valence, OrbitGraphSlice};
pub use rauzy::{rauzy_step, reduce, transmit, Move, MoveKind, Transmission};
pub use similarity::{detect_self_similarity, Policy, SimilarityReport};
pub use system::{Iis, Interval, IntervalPair, Member, Side, Slot, Validation};
