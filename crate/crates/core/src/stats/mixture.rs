//! Gap-expectation checks for walks with exchangeable (mixture) increments.

use serde_json::json;

use super::mc::mc_mean;
use super::report::{CheckResult, ExperimentReport};
use super::samplers::{sample_gap_shifted, sample_walk_sum};
use crate::walk::IncrementSpec;

/// Compare the Monte Carlo gap expectation `E D_{k,n}` against the exact
/// finite-`n` identity `E S_k^+ / k + E S_{n-k+1}^- / (n-k+1)` (both sides
/// estimated by independent runs), and against the closed-form limits
/// available from the component moments.
pub fn mixture_gap_checks(
    spec: &IncrementSpec,
    k: usize,
    n: usize,
    reps: usize,
    seed: u64,
) -> ExperimentReport {
    assert!(k >= 1 && n > k);
    let mut report = ExperimentReport::new(
        "mixture-gaps",
        json!({"spec": spec, "k": k, "n": n, "reps": reps}),
        seed,
    );

    // Left side: direct gap expectation.
    let gap = mc_mean(reps, seed, |rng| sample_gap_shifted(spec, k, n, rng).0);

    // Right side: independent estimates of the two positive-part terms.
    let up = mc_mean(reps, seed ^ 0xa5a5, |rng| {
        sample_walk_sum(spec, k, rng).max(0.0) / k as f64
    });
    let m = n - k + 1;
    let down = mc_mean(reps, seed ^ 0x5a5a, |rng| {
        (-sample_walk_sum(spec, m, rng)).max(0.0) / m as f64
    });
    let rhs = up.mean + down.mean;
    let se = (gap.std_error.powi(2) + up.std_error.powi(2) + down.std_error.powi(2)).sqrt();
    report.push(CheckResult::std_errors(
        "gap-identity",
        gap.mean,
        rhs,
        se,
        3.0,
        "E D_{k,n} = E S_k^+/k + E S_{n-k+1}^-/(n-k+1), both sides by independent MC",
    ));

    if spec.is_centered() {
        // Centered components: E D_k scales like the mixture-averaged root
        // second moment over sqrt(2 pi k).
        let target = spec.expected_conditional_rms();
        let scaled = up.mean * (2.0 * std::f64::consts::PI * k as f64).sqrt();
        let scale = (2.0 * std::f64::consts::PI * k as f64).sqrt();
        report.push(CheckResult::relative(
            "centered-scaled-gap",
            scaled,
            target,
            0.05,
            "sqrt(2 pi k) E S_k^+/k vs mixture-averaged rms of increments",
        ));
        report.push(CheckResult::std_errors(
            "centered-scaled-gap-se",
            scaled,
            target,
            up.std_error * scale,
            3.0,
            "same comparison in standard-error units",
        ));
    } else {
        // Non-centered components: the limiting gap expectation adds the
        // expected negative part of the conditional mean, and tends to the
        // expected absolute conditional mean for large k.
        let neg = spec.expected_negative_conditional_mean();
        let limit_gap = up.mean + neg;
        let target = spec.expected_abs_conditional_mean();
        report.push(CheckResult::std_errors(
            "limit-mean-gap",
            limit_gap,
            target,
            up.std_error,
            3.0,
            "E S_k^+/k + E[(E(X|component))^-] vs E|E(X|component)| for large k",
        ));
    }
    report
}
