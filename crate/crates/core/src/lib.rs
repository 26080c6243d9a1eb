//! Simulation and numerical verification of extreme order statistics of
//! random walks.
//!
//! The library is organised around the objects that show up when a walk is
//! examined near its minimum:
//!
//! * [`walk`] — increment models, path generation, order statistics and gaps;
//! * [`feller`] — the upward/downward Feller chains, exact path recovery,
//!   ladder variables and the limiting order statistics `W_1..W_K`;
//! * [`ssrw`] — exact rational combinatorics and specialised samplers for the
//!   simple symmetric walk (enumeration oracle, Chebyshev generating
//!   functions, branching representations of occupation counts);
//! * [`valley`] — the closed-form limit law of the Gaussian walk's minimum
//!   gap to its embedding Brownian path (special functions, infinite
//!   products, Bessel(3) Monte Carlo);
//! * [`stats`] — distribution distances, test statistics and experiment
//!   harness shared by the verification suite;
//! * [`experiments`] — the named verification experiments exposed through
//!   the CLI `verify` subcommand.

pub mod experiments;
pub mod feller;
pub mod rng;
pub mod ssrw;
pub mod stats;
pub mod valley;
pub mod walk;

pub use feller::{ChainSegment, FellerPair, LadderRecord, LimitOrderStats, SegmentKind};
pub use ssrw::pmf::ExactPmf;
pub use stats::report::ExperimentReport;
pub use walk::{IncrementSpec, OrderStats, WalkPath};
