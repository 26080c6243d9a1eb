//! The Brownian-valley limit law of Gaussian walks: special functions,
//! closed-form tail and mean, and Bessel(3) Monte Carlo cross-checks.

pub mod bes3;
pub mod evaluator;
pub mod mc;
pub mod quad;
pub mod special;
pub mod survival;
mod tailfit;

pub use evaluator::{h_a, h_a_quadrature, k_a, MeanResult, ValleyError, ValleyEvaluator};
pub use special::{erfc, owen_t, zeta_half};
pub use survival::{g_a_exact, valley_mean_exact, valley_tail_exact};

/// The exact mean of the valley minimum, `-zeta(1/2)/sqrt(2 pi)`, from the
/// independent alternating-series evaluation of `zeta(1/2)`.
pub fn exact_valley_mean() -> f64 {
    -zeta_half() / (2.0 * std::f64::consts::PI).sqrt()
}
