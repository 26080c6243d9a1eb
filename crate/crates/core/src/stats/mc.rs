//! Monte Carlo mean estimation with replica-keyed streams.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::replica_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// 95% confidence interval.
    pub ci: (f64, f64),
    pub reps: usize,
}

impl MeanEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        assert!(samples.len() >= 2);
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        MeanEstimate {
            mean,
            std_error: se,
            ci: (mean - 1.96 * se, mean + 1.96 * se),
            reps: samples.len(),
        }
    }

    /// Absolute distance from `target` in units of this standard error.
    pub fn z_against(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.std_error.max(1e-300)
    }
}

/// Run `reps` replicas of `estimator` in parallel; replica `r` receives the
/// stream keyed by `(seed, r)`, so the result does not depend on scheduling.
pub fn mc_mean<F>(reps: usize, seed: u64, estimator: F) -> MeanEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    assert!(reps >= 2);
    let samples: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            estimator(&mut rng)
        })
        .collect();
    MeanEstimate::from_samples(&samples)
}

/// As [`mc_mean`] but returning the raw samples alongside the estimate.
pub fn mc_samples<F>(reps: usize, seed: u64, estimator: F) -> (Vec<f64>, MeanEstimate)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    assert!(reps >= 2);
    let samples: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            estimator(&mut rng)
        })
        .collect();
    let est = MeanEstimate::from_samples(&samples);
    (samples, est)
}
