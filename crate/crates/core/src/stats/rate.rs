//! Convergence-rate diagnostic: binned total variation between the law of
//! the lowest shifted order statistic at finite `n` and its limit, fitted on
//! a log-log grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dist::BinnedDist;
use super::samplers::{ascending_ladder_height, descending_ladder_depth, sample_gap_shifted};
use crate::feller::limit_order_stats_with;
use crate::rng::replica_rng;
use crate::walk::IncrementSpec;

#[derive(Debug, Error)]
pub enum RateError {
    #[error("rate diagnostic requires a continuous increment distribution")]
    DiscreteIncrements,
    #[error("need at least 4 grid points, got {0}")]
    GridTooSmall(usize),
    #[error(transparent)]
    Dist(#[from] super::dist::DistError),
}

fn is_continuous(spec: &IncrementSpec) -> bool {
    match spec {
        IncrementSpec::SimpleSymmetric => false,
        IncrementSpec::Gaussian { .. } | IncrementSpec::Laplace { .. } => true,
        IncrementSpec::Mixture { components } => components.iter().all(|(_, s)| is_continuous(s)),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateFit {
    pub n_grid: Vec<usize>,
    pub tv: Vec<f64>,
    /// Total variation between two independent halves of the reference
    /// sample: the resolution floor of the estimator.
    pub noise_floor: f64,
    /// Grid points excluded from the fit for sitting at the noise floor.
    pub excluded: Vec<bool>,
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence interval for the slope.
    pub slope_ci: (f64, f64),
    pub reps_per_point: usize,
    pub ref_reps: usize,
}

/// Two-sided t quantiles at 97.5% for small residual degrees of freedom.
fn t_quantile_975(df: usize) -> f64 {
    const TABLE: [f64; 10] =
        [12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228];
    if df == 0 {
        f64::INFINITY
    } else if df <= 10 {
        TABLE[df - 1]
    } else {
        1.96 + 3.0 / df as f64
    }
}

/// Estimate `TV(law of W_{k,n}, limit law)` across `n_grid` and fit
/// `log10 TV ~ slope * log10 n + intercept`.
///
/// For `k = 1` the limit sample is drawn from the product representation of
/// the lowest gap (the minimum of the two first ladder heights); for larger
/// `k` it falls back to the chain construction at a horizon of 100x the
/// largest grid point, which is substantially slower.
pub fn rate_fit(
    spec: &IncrementSpec,
    k: usize,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<RateFit, RateError> {
    if !is_continuous(spec) {
        return Err(RateError::DiscreteIncrements);
    }
    if n_grid.len() < 4 {
        return Err(RateError::GridTooSmall(n_grid.len()));
    }
    assert!(k >= 1);
    let sigma = spec.expected_conditional_rms();
    let width = 0.05 * sigma * (k as f64).sqrt();
    let ref_reps = 2 * reps;
    let cap = 1_000_000usize;
    let max_n = *n_grid.iter().max().expect("nonempty");

    // Limit-law reference sample.
    let limit_samples: Vec<f64> = (0..ref_reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed ^ 0x51ab_17ee, r);
            if k == 1 {
                let up = ascending_ladder_height(spec, cap, &mut rng).unwrap_or(f64::INFINITY);
                let down = descending_ladder_depth(spec, cap, &mut rng).unwrap_or(f64::INFINITY);
                up.min(down)
            } else {
                let out = limit_order_stats_with(spec, k, 100 * max_n, 4.0, &mut rng);
                out.w[k - 1]
            }
        })
        .collect();
    let half = ref_reps / 2;
    let ref_a = BinnedDist::from_samples(0.0, width, limit_samples[..half].iter().copied())?;
    let ref_b = BinnedDist::from_samples(0.0, width, limit_samples[half..].iter().copied())?;
    let noise_floor = ref_a.tv(&ref_b)?;
    let reference = BinnedDist::from_samples(0.0, width, limit_samples.iter().copied())?;

    let mut tv = Vec::with_capacity(n_grid.len());
    for (i, &n) in n_grid.iter().enumerate() {
        let samples: Vec<f64> = (0..reps as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = replica_rng(seed ^ (i as u64 + 1), r);
                sample_gap_shifted(spec, k, n, &mut rng).1
            })
            .collect();
        let dist = BinnedDist::from_samples(0.0, width, samples)?;
        tv.push(dist.tv(&reference)?);
    }

    // Points below ~1.3x the floor are dominated by estimator resolution
    // rather than distributional distance; keep points where the signal
    // still dominates.
    let excluded: Vec<bool> = tv.iter().map(|t| *t < 1.3 * noise_floor).collect();
    let points: Vec<(f64, f64)> = n_grid
        .iter()
        .zip(tv.iter())
        .zip(excluded.iter())
        .filter(|(_, ex)| !**ex)
        .map(|((n, t), _)| ((*n as f64).log10(), t.log10()))
        .collect();

    let (slope, intercept, ci) = if points.len() >= 3 {
        ols_with_ci(&points)
    } else {
        (f64::NAN, f64::NAN, (f64::NAN, f64::NAN))
    };

    Ok(RateFit {
        n_grid: n_grid.to_vec(),
        tv,
        noise_floor,
        excluded,
        slope,
        intercept,
        slope_ci: ci,
        reps_per_point: reps,
        ref_reps,
    })
}

fn ols_with_ci(points: &[(f64, f64)]) -> (f64, f64, (f64, f64)) {
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let df = points.len().saturating_sub(2);
    let se = if df > 0 { (sse / df as f64 / sxx).sqrt() } else { f64::INFINITY };
    let t = t_quantile_975(df);
    (slope, intercept, (slope - t * se, slope + t * se))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_discrete_spec() {
        let err = rate_fit(&IncrementSpec::SimpleSymmetric, 1, &[10, 20, 40, 80], 100, 1);
        assert!(matches!(err, Err(RateError::DiscreteIncrements)));
    }

    #[test]
    fn rejects_short_grid() {
        let err = rate_fit(&IncrementSpec::gaussian(1.0), 1, &[10, 20], 100, 1);
        assert!(matches!(err, Err(RateError::GridTooSmall(2))));
    }

    #[test]
    fn ols_recovers_line() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64, 3.0 - 0.5 * i as f64)).collect();
        let (slope, intercept, ci) = ols_with_ci(&pts);
        assert!((slope + 0.5).abs() < 1e-12);
        assert!((intercept - 3.0).abs() < 1e-12);
        assert!(ci.0 <= slope && slope <= ci.1);
    }
}
