//! Walk generation and order statistics.
//!
//! A [`WalkPath`] holds the increments `X_1..X_n` and partial sums
//! `S_0 = 0, S_1, .., S_n` of a finite walk. [`order_statistics`] sorts the
//! sums into the nondecreasing sequence `M_0 <= .. <= M_n`, together with the
//! gaps `D_k = M_k - M_{k-1}`, the min-shifted values `W_k = M_k - M_0` and
//! the last index at which the minimum is attained.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::rng_from_seed;

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("invalid increment spec: {0}")]
    InvalidSpec(String),
    #[error("increments must be finite, found {0} at position {1}")]
    NonFinite(f64, usize),
    #[error("walk length must be >= 1")]
    EmptyPath,
}

/// Increment distribution of a walk.
///
/// `Mixture` draws one component per path and then generates i.i.d.
/// increments from it, which makes the increments exchangeable rather than
/// independent: conditionally on the drawn component they are i.i.d., and the
/// component plays the role of the conditioning sigma-field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum IncrementSpec {
    /// `+1` or `-1` with probability 1/2 each.
    SimpleSymmetric,
    /// Normal with the given mean and standard deviation per step.
    Gaussian { mean: f64, sigma: f64 },
    /// Two-sided exponential with density `exp(-|x|/scale) / (2 scale)`.
    Laplace { scale: f64 },
    /// Weighted mixture of sub-specs, one drawn per path.
    Mixture { components: Vec<(f64, IncrementSpec)> },
}

impl IncrementSpec {
    pub fn gaussian(sigma: f64) -> Self {
        IncrementSpec::Gaussian { mean: 0.0, sigma }
    }

    pub fn validate(&self) -> Result<(), WalkError> {
        match self {
            IncrementSpec::SimpleSymmetric => Ok(()),
            IncrementSpec::Gaussian { mean, sigma } => {
                if !sigma.is_finite() || *sigma <= 0.0 {
                    return Err(WalkError::InvalidSpec(format!("sigma = {sigma} must be > 0")));
                }
                if !mean.is_finite() {
                    return Err(WalkError::InvalidSpec(format!("mean = {mean} must be finite")));
                }
                Ok(())
            }
            IncrementSpec::Laplace { scale } => {
                if !scale.is_finite() || *scale <= 0.0 {
                    return Err(WalkError::InvalidSpec(format!("scale = {scale} must be > 0")));
                }
                Ok(())
            }
            IncrementSpec::Mixture { components } => {
                if components.is_empty() {
                    return Err(WalkError::InvalidSpec("empty mixture".into()));
                }
                let mut total = 0.0;
                for (w, sub) in components {
                    if !w.is_finite() || *w <= 0.0 {
                        return Err(WalkError::InvalidSpec(format!("weight {w} must be > 0")));
                    }
                    if matches!(sub, IncrementSpec::Mixture { .. }) {
                        return Err(WalkError::InvalidSpec("nested mixtures not supported".into()));
                    }
                    sub.validate()?;
                    total += w;
                }
                if (total - 1.0).abs() > 1e-9 {
                    return Err(WalkError::InvalidSpec(format!("weights sum to {total}, not 1")));
                }
                Ok(())
            }
        }
    }

    /// Mean of a single increment (averaged over mixture components).
    pub fn mean(&self) -> f64 {
        match self {
            IncrementSpec::SimpleSymmetric => 0.0,
            IncrementSpec::Gaussian { mean, .. } => *mean,
            IncrementSpec::Laplace { .. } => 0.0,
            IncrementSpec::Mixture { components } => {
                components.iter().map(|(w, s)| w * s.mean()).sum()
            }
        }
    }

    /// `E[(E(X | component))^-]`: the expected negative part of the
    /// conditional mean. Zero for all non-mixture specs with zero drift.
    pub fn expected_negative_conditional_mean(&self) -> f64 {
        match self {
            IncrementSpec::Mixture { components } => components
                .iter()
                .map(|(w, s)| w * (-s.mean()).max(0.0))
                .sum(),
            _ => (-self.mean()).max(0.0),
        }
    }

    /// `E |E(X | component)|`.
    pub fn expected_abs_conditional_mean(&self) -> f64 {
        match self {
            IncrementSpec::Mixture { components } => {
                components.iter().map(|(w, s)| w * s.mean().abs()).sum()
            }
            _ => self.mean().abs(),
        }
    }

    /// `E sqrt(E(X^2 | component))`, the mixture-averaged root second moment.
    pub fn expected_conditional_rms(&self) -> f64 {
        match self {
            IncrementSpec::Mixture { components } => components
                .iter()
                .map(|(w, s)| w * s.expected_conditional_rms())
                .sum(),
            IncrementSpec::SimpleSymmetric => 1.0,
            IncrementSpec::Gaussian { mean, sigma } => (mean * mean + sigma * sigma).sqrt(),
            IncrementSpec::Laplace { scale } => (2.0 * scale * scale).sqrt(),
        }
    }

    /// True when every mixture component (or the spec itself) is centered.
    pub fn is_centered(&self) -> bool {
        match self {
            IncrementSpec::Mixture { components } => components.iter().all(|(_, s)| s.mean() == 0.0),
            _ => self.mean() == 0.0,
        }
    }

    /// Draw one increment; panics on an unresolved mixture.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        self.sample_increment(rng)
    }

    fn sample_increment<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            IncrementSpec::SimpleSymmetric => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            IncrementSpec::Gaussian { mean, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sigma * z
            }
            IncrementSpec::Laplace { scale } => {
                // Inverse CDF: sign(u - 1/2) handled through the two halves.
                let u: f64 = rng.random();
                if u < 0.5 {
                    scale * (2.0 * u.max(f64::MIN_POSITIVE)).ln()
                } else {
                    -scale * (2.0 * (1.0 - u).max(f64::MIN_POSITIVE)).ln()
                }
            }
            IncrementSpec::Mixture { .. } => unreachable!("mixture resolved before sampling"),
        }
    }

    /// Resolve a mixture to the component used for one path; a non-mixture
    /// spec resolves to itself without consuming randomness.
    pub fn resolve_component<'a, R: Rng>(&'a self, rng: &mut R) -> &'a IncrementSpec {
        self.resolve(rng)
    }

    /// Resolve a mixture to the component used for one path.
    fn resolve<'a, R: Rng>(&'a self, rng: &mut R) -> &'a IncrementSpec {
        match self {
            IncrementSpec::Mixture { components } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (w, sub) in components {
                    acc += w;
                    if u < acc {
                        return sub;
                    }
                }
                &components.last().expect("non-empty mixture").1
            }
            other => other,
        }
    }
}

/// Increments and partial sums of a finite walk, `sums[0] == 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WalkPathSerde", into = "WalkPathSerde")]
pub struct WalkPath {
    increments: Vec<f64>,
    sums: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct WalkPathSerde {
    increments: Vec<f64>,
}

impl TryFrom<WalkPathSerde> for WalkPath {
    type Error = WalkError;
    fn try_from(value: WalkPathSerde) -> Result<Self, WalkError> {
        WalkPath::from_increments(value.increments)
    }
}

impl From<WalkPath> for WalkPathSerde {
    fn from(path: WalkPath) -> Self {
        WalkPathSerde { increments: path.increments }
    }
}

impl WalkPath {
    /// Build a path from its increments; non-finite values are rejected so
    /// that every downstream sort can use plain total order.
    pub fn from_increments(increments: Vec<f64>) -> Result<Self, WalkError> {
        for (i, x) in increments.iter().enumerate() {
            if !x.is_finite() {
                return Err(WalkError::NonFinite(*x, i + 1));
            }
        }
        let mut sums = Vec::with_capacity(increments.len() + 1);
        let mut s = 0.0;
        sums.push(0.0);
        for x in &increments {
            s += x;
            sums.push(s);
        }
        Ok(WalkPath { increments, sums })
    }

    /// The empty walk `S_0 = 0`.
    pub fn empty() -> Self {
        WalkPath { increments: Vec::new(), sums: vec![0.0] }
    }

    pub fn n(&self) -> usize {
        self.increments.len()
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// Partial sums `S_0..S_n`, length `n + 1`.
    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    /// CSV serialization: header `x`, one increment per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x\n");
        for x in &self.increments {
            out.push_str(&format!("{x}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, WalkError> {
        let mut increments = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (idx == 0 && line == "x") {
                continue;
            }
            let x: f64 = line
                .parse()
                .map_err(|_| WalkError::InvalidSpec(format!("bad CSV value {line:?}")))?;
            increments.push(x);
        }
        WalkPath::from_increments(increments)
    }
}

/// Sorted levels of a walk, with gaps, min-shifted levels and the last
/// argmin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderStats {
    /// `M_0 <= M_1 <= .. <= M_n`, the sorted partial sums.
    pub values: Vec<f64>,
    /// `D_k = M_k - M_{k-1}` for `k = 1..n` (length `n`).
    pub gaps: Vec<f64>,
    /// `W_k = M_k - M_0` (length `n + 1`, `W_0 = 0`).
    pub shifted: Vec<f64>,
    /// Last index `k` with `S_k == min`.
    pub argmin_last: usize,
    pub min: f64,
    pub max: f64,
}

/// Sort the partial sums of `path` into order statistics.
pub fn order_statistics(path: &WalkPath) -> OrderStats {
    let mut values = path.sums().to_vec();
    values.sort_unstable_by(f64::total_cmp);
    let min = values[0];
    let max = *values.last().expect("sums nonempty");
    let gaps = values.windows(2).map(|w| w[1] - w[0]).collect();
    let shifted = values.iter().map(|v| v - min).collect();
    let mut argmin_last = 0;
    for (k, s) in path.sums().iter().enumerate() {
        if *s == min {
            argmin_last = k;
        }
    }
    OrderStats { values, gaps, shifted, argmin_last, min, max }
}

/// The walk with increments in reversed order, `(X_n, .., X_1)`.
pub fn reverse_path(path: &WalkPath) -> WalkPath {
    let mut increments = path.increments().to_vec();
    increments.reverse();
    WalkPath::from_increments(increments).expect("reversed increments stay finite")
}

/// Draw a walk of length `n`. Deterministic in `(spec, n, seed)`; for a
/// mixture the component is drawn once and then held for the whole path.
pub fn sample_path(spec: &IncrementSpec, n: usize, seed: u64) -> Result<WalkPath, WalkError> {
    spec.validate()?;
    if n == 0 {
        return Err(WalkError::EmptyPath);
    }
    let mut rng = rng_from_seed(seed);
    let component = spec.resolve(&mut rng);
    let increments: Vec<f64> = (0..n).map(|_| component.sample_increment(&mut rng)).collect();
    WalkPath::from_increments(increments)
}

/// Same as [`sample_path`] but reusing a caller-provided generator, for
/// replica loops that key streams off a base seed.
pub fn sample_path_with<R: Rng>(spec: &IncrementSpec, n: usize, rng: &mut R) -> WalkPath {
    let component = spec.resolve(rng);
    let increments: Vec<f64> = (0..n).map(|_| component.sample_increment(rng)).collect();
    WalkPath::from_increments(increments).expect("sampled increments are finite")
}
