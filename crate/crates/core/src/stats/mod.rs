//! Distribution comparison, test statistics and Monte Carlo harness shared
//! by the verification experiments.

pub mod dist;
pub mod hypothesis;
pub mod mc;
pub mod mixture;
pub mod rate;
pub mod report;
pub mod samplers;

pub use dist::{BinnedDist, DiscreteDist, DistError};
pub use hypothesis::{chi_square_gof, chi_square_two_sample, ks_one_sample, ks_two_sample};
pub use mc::{mc_mean, mc_samples, MeanEstimate};
pub use rate::{rate_fit, RateFit};
pub use report::{CheckResult, ExperimentReport, ToleranceKind};
