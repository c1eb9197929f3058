//! Exact arithmetic in `Q(lambda)` for a real algebraic `lambda`.
//!
//! An element is a residue polynomial modulo the minimal polynomial of the
//! generator; the generator itself is pinned by a rational isolating interval.
//! Signs are decided by interval evaluation with bisection refinement, so
//! every comparison is exact.

mod error;
mod field;
mod matrix;
mod poly;
mod rational;

pub use error::FieldError;
pub use field::{FieldElement, FieldHandle, NumberField};
pub use matrix::{solve, EigenVector, RatMatrix};
pub use poly::{isolate_real_roots, Poly};
pub use rational::{parse_rational, rat, rat_to_f64, rat_to_string, Rational};
