//! Exact-in-law sampling of a 3-dimensional Bessel process at grid times.
//!
//! The process is realised as the norm of three independent Brownian
//! coordinates, so values at any finite set of times are exact: there is no
//! SDE stepping and no discretization bias at the grid points.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Values of the process at the given strictly increasing times `>= 0`.
pub fn sample_bes3_grid<R: Rng>(times: &[f64], rng: &mut R) -> Vec<f64> {
    assert!(
        times.windows(2).all(|w| w[0] < w[1]) && times.first().map(|t| *t >= 0.0).unwrap_or(true),
        "times must be strictly increasing and nonnegative"
    );
    let mut out = Vec::with_capacity(times.len());
    let mut prev_t = 0.0;
    let mut coords = [0.0f64; 3];
    for &t in times {
        let sd = (t - prev_t).sqrt();
        for c in coords.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *c += sd * z;
        }
        prev_t = t;
        out.push((coords[0] * coords[0] + coords[1] * coords[1] + coords[2] * coords[2]).sqrt());
    }
    out
}

/// One draw of the process at a single time: `sqrt(t) * |Z|` for a standard
/// 3-dimensional normal `Z`.
pub fn sample_bes3_at<R: Rng>(t: f64, rng: &mut R) -> f64 {
    let z1: f64 = StandardNormal.sample(rng);
    let z2: f64 = StandardNormal.sample(rng);
    let z3: f64 = StandardNormal.sample(rng);
    t.sqrt() * (z1 * z1 + z2 * z2 + z3 * z3).sqrt()
}

/// One unit-time transition from value `x`: the norm of `(x + Z1, Z2, Z3)`.
pub fn transition_from<R: Rng>(x: f64, rng: &mut R) -> f64 {
    let z1: f64 = StandardNormal.sample(rng);
    let z2: f64 = StandardNormal.sample(rng);
    let z3: f64 = StandardNormal.sample(rng);
    let a = x + z1;
    (a * a + z2 * z2 + z3 * z3).sqrt()
}

/// Entrance density `p_t(x) = sqrt(2/(pi t^3)) x^2 exp(-x^2/(2t))`.
pub fn entrance_density(t: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (2.0 / (std::f64::consts::PI * t * t * t)).sqrt() * x * x * (-x * x / (2.0 * t)).exp()
}

/// Unit-time transition density
/// `q_1(x, y) = (y/x) (phi(y-x) - phi(y+x))` for `x, y > 0`.
pub fn transition_density(x: f64, y: f64) -> f64 {
    if x <= 0.0 || y <= 0.0 {
        return 0.0;
    }
    use super::special::normal_pdf;
    y / x * (normal_pdf(y - x) - normal_pdf(y + x))
}

/// `P(R(1) > a | R(0) = x)`, closed form from the transition density.
pub fn transition_survival(x: f64, a: f64) -> f64 {
    use super::special::{normal_cdf, normal_pdf};
    if a <= 0.0 {
        return 1.0;
    }
    // int_0^a q_1(x,y) dy = (phi(a+x) - phi(a-x))/x + Phi(a-x) + Phi(a+x) - 1
    let below =
        (normal_pdf(a + x) - normal_pdf(a - x)) / x + normal_cdf(a - x) + normal_cdf(a + x) - 1.0;
    (1.0 - below).clamp(0.0, 1.0)
}
