//! Exact combinatorics and specialised samplers for the simple symmetric
//! walk.

pub mod branching;
pub mod chains;
pub mod exact;
pub mod pmf;

pub use branching::{BranchingConfig, OccupationCounts};
pub use pmf::ExactPmf;

use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Lossy conversion of an exact rational to `f64`.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational fits in f64 range")
}
