//! Streaming samplers of low order statistics of walks: one pass, no path
//! storage.

use rand::Rng;

use crate::walk::IncrementSpec;

/// Track the `k+1` smallest values seen (the levels `M_0..M_k`).
#[derive(Debug, Clone)]
pub struct LowestTracker {
    best: Vec<f64>,
    cap: usize,
}

impl LowestTracker {
    pub fn new(k: usize) -> Self {
        let mut best = Vec::with_capacity(k + 2);
        best.push(0.0);
        LowestTracker { best, cap: k + 1 }
    }

    #[inline]
    pub fn push(&mut self, v: f64) {
        if self.best.len() < self.cap {
            let pos = self.best.partition_point(|b| *b <= v);
            self.best.insert(pos, v);
        } else if v < self.best[self.cap - 1] {
            self.best.pop();
            let pos = self.best.partition_point(|b| *b <= v);
            self.best.insert(pos, v);
        }
    }

    /// `M_j - M_0` for `j <= k`, defined once `n >= k`.
    pub fn shifted(&self, j: usize) -> f64 {
        self.best[j] - self.best[0]
    }

    /// `M_j - M_{j-1}`.
    pub fn gap(&self, j: usize) -> f64 {
        self.best[j] - self.best[j - 1]
    }

    pub fn levels(&self) -> &[f64] {
        &self.best
    }
}

/// Sample `(D_{k,n}, W_{k,n})` of one walk of length `n` (the path's
/// component is resolved once, preserving exchangeability).
pub fn sample_gap_shifted<R: Rng>(
    spec: &IncrementSpec,
    k: usize,
    n: usize,
    rng: &mut R,
) -> (f64, f64) {
    assert!(k >= 1 && n >= k);
    let component = spec.resolve_component(rng).clone();
    let mut tracker = LowestTracker::new(k);
    let mut s = 0.0f64;
    for _ in 0..n {
        s += component.draw(rng);
        tracker.push(s);
    }
    (tracker.gap(k), tracker.shifted(k))
}

/// Draw `S_k` for one path of the spec. Gaussian components use the exact
/// normal law of the sum; everything else sums `k` increments.
pub fn sample_walk_sum<R: Rng>(spec: &IncrementSpec, k: usize, rng: &mut R) -> f64 {
    let component = spec.resolve_component(rng).clone();
    match component {
        IncrementSpec::Gaussian { mean, sigma } => {
            let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng);
            k as f64 * mean + sigma * (k as f64).sqrt() * z
        }
        other => (0..k).map(|_| other.draw(rng)).sum(),
    }
}

/// First strict-ascending ladder height of a centered walk, or `None` when
/// the walk has not entered `(0, inf)` within `cap` steps.
pub fn ascending_ladder_height<R: Rng>(
    spec: &IncrementSpec,
    cap: usize,
    rng: &mut R,
) -> Option<f64> {
    let component = spec.resolve_component(rng).clone();
    let mut s = 0.0f64;
    for _ in 0..cap {
        s += component.draw(rng);
        if s > 0.0 {
            return Some(s);
        }
    }
    None
}

/// First weak-descending ladder height (returned as `-S_tau >= 0`), or
/// `None` past `cap` steps.
pub fn descending_ladder_depth<R: Rng>(
    spec: &IncrementSpec,
    cap: usize,
    rng: &mut R,
) -> Option<f64> {
    let component = spec.resolve_component(rng).clone();
    let mut s = 0.0f64;
    for _ in 0..cap {
        s += component.draw(rng);
        if s <= 0.0 {
            return Some(-s);
        }
    }
    None
}
