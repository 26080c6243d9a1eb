//! Monte Carlo estimation of the valley order statistics, and the
//! walk-vs-Brownian discretization experiment.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bes3::transition_survival;
use super::quad::integrate;
use crate::rng::replica_rng;

/// The chance that any future grid value of an arm at height `v` undercuts
/// level `a` is `2 W(a) / v` to leading order, with
/// `W(a) = int_0^a y^2 P_y(R(1) > a) dy`:
/// the naive visit-count sum `2a^3/(3v)` overstates it by the mean size of
/// a dip cluster, because consecutive grid points near a dip are strongly
/// correlated. `DipLaw` tabulates `W` and its antiderivative
/// `V(m) = int_0^m W(a) da`, which gives the stopping bias
/// `E[(m - future min)^+ | v] = 2 V(m) / v`.
struct DipLaw {
    step: f64,
    v_table: Vec<f64>,
}

impl DipLaw {
    fn new(max_level: f64) -> Self {
        let step = 1.0 / 32.0;
        let n = (max_level / step).ceil() as usize + 1;
        let mut w = Vec::with_capacity(n);
        for i in 0..n {
            let a = i as f64 * step;
            let wi = if a == 0.0 {
                0.0
            } else {
                integrate(|y| y * y * transition_survival(y, a), 0.0, a, 1e-10)
                    .map(|r| r.value)
                    .unwrap_or(a * a * a / 3.0)
            };
            w.push(wi);
        }
        // Trapezoid antiderivative of W.
        let mut v_table = Vec::with_capacity(n);
        let mut acc = 0.0;
        v_table.push(0.0);
        for i in 1..n {
            acc += 0.5 * (w[i - 1] + w[i]) * step;
            v_table.push(acc);
        }
        DipLaw { step, v_table }
    }

    /// `V(m) = int_0^m W(a) da`, linearly interpolated.
    fn v(&self, m: f64) -> f64 {
        let x = (m / self.step).max(0.0);
        let i = (x as usize).min(self.v_table.len() - 2);
        let frac = (x - i as f64).clamp(0.0, 1.0);
        self.v_table[i] * (1.0 - frac) + self.v_table[i + 1] * frac
    }
}

/// One Brownian arm evaluated on the grid `t0, t0+1, t0+2, ..` through the
/// norm of three exact Gaussian coordinates. `next` returns consecutive grid
/// values.
struct Bes3Arm {
    coords: [f64; 3],
    first: bool,
    t0: f64,
}

impl Bes3Arm {
    fn new(t0: f64) -> Self {
        Bes3Arm { coords: [0.0; 3], first: true, t0 }
    }

    /// Squared norm at the next grid time; the caller takes square roots
    /// only when a value actually enters the candidate set.
    #[inline]
    fn next_sq<R: Rng>(&mut self, rng: &mut R) -> f64 {
        let sd = if self.first {
            self.first = false;
            self.t0.sqrt()
        } else {
            1.0
        };
        let mut norm_sq = 0.0;
        for c in self.coords.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *c += sd * z;
            norm_sq += *c * *c;
        }
        norm_sq
    }

}

/// Empirical joint law of the lowest `K+1` values of the two-sided valley
/// grid, from `reps` independent replicas.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValleyMcResult {
    pub k: usize,
    pub reps: usize,
    /// Row-major `reps x (k+1)` matrix of sampled order statistics.
    pub samples: Vec<f64>,
    /// Mean of each order statistic.
    pub means: Vec<f64>,
    /// Standard error of each mean.
    pub std_errors: Vec<f64>,
    /// Estimated upward bias of the minimum from stopping the arms at a
    /// finite height (subtract from `means[0]` for the corrected mean).
    /// The estimate uses the exact conditional dip law of the process given
    /// the stop height, so its own error is a small fraction of it.
    pub min_bias_estimate: f64,
    /// Residual truncation bound after the bias correction, plus the raw
    /// bound for replicas that hit the hard horizon.
    pub truncation_bound: f64,
    /// True when `truncation_bound` exceeds 1e-4.
    pub insufficient_horizon: bool,
}

impl ValleyMcResult {
    pub fn order_stat_samples(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        assert!(j <= self.k);
        self.samples.iter().skip(j).step_by(self.k + 1).copied()
    }

    /// Mean of the minimum with the stopping-bias correction applied.
    pub fn corrected_min_mean(&self) -> f64 {
        self.means[0] - self.min_bias_estimate
    }
}

/// Sample the valley order statistics `M_0 <= .. <= M_K`.
///
/// Each replica draws `U` uniform, runs the two arms on the offset grids
/// `U + j` and `(1-U) + j`, and keeps the `K+1` smallest values seen. An arm
/// stops once the chance that any later grid value undercuts the current
/// `K`-th candidate is below `dip_tol` (the grid-dip bound `2 w^3 / (3 x)`
/// for an arm at height `x`), or at `horizon` grid points, whichever comes
/// first. The residual bias of the minimum is estimated analytically per
/// path and reported.
pub fn mc_valley_order_stats(
    k: usize,
    horizon: usize,
    reps: usize,
    seed: u64,
    dip_tol: f64,
) -> ValleyMcResult {
    assert!(horizon >= 64, "horizon too small to settle the candidates");
    let dip_law = DipLaw::new(6.0);
    let rows: Vec<(Vec<f64>, f64, f64)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let u: f64 = rng.random();
            let u = u.clamp(1e-12, 1.0 - 1e-12);
            let mut best: Vec<f64> = Vec::with_capacity(k + 2);
            // The arms advance in lockstep so that the stopping rule sees
            // the union of candidates; each stops once the chance of any of
            // its later grid values undercutting the shared K-th candidate
            // is below dip_tol.
            let mut arms = [Bes3Arm::new(u), Bes3Arm::new(1.0 - u)];
            let mut done = [false, false];
            let mut capped = [false, false];
            let mut steps = [0usize; 2];
            let mut height_sq = [0.0f64; 2];
            // Stop an arm at height v once 2 w^3/(3v) < dip_tol and v > 4w,
            // for w the shared K-th candidate; all comparisons run on
            // squared values so the hot loop performs no square roots.
            let mut entry_sq = f64::INFINITY;
            let mut stop_sq = 0.0f64;
            while !(done[0] && done[1]) {
                for i in 0..2 {
                    if done[i] {
                        continue;
                    }
                    let v_sq = arms[i].next_sq(&mut rng);
                    steps[i] += 1;
                    height_sq[i] = v_sq;
                    if v_sq < entry_sq {
                        let v = v_sq.sqrt();
                        if best.len() <= k {
                            let pos = best.partition_point(|b| *b <= v);
                            best.insert(pos, v);
                        } else {
                            best.pop();
                            let pos = best.partition_point(|b| *b <= v);
                            best.insert(pos, v);
                        }
                        if best.len() == k + 1 {
                            let w = best[k];
                            entry_sq = w * w;
                            let stop = (2.0 * w * w * w / (3.0 * dip_tol)).max(4.0 * w);
                            stop_sq = stop * stop;
                        }
                    }
                    if steps[i] >= 48 && best.len() == k + 1 && v_sq > stop_sq {
                        done[i] = true;
                    }
                    if !done[i] && steps[i] >= horizon {
                        done[i] = true;
                        capped[i] = true;
                    }
                }
            }
            // E[(m - future grid min)^+ | arm height x] = 2 V(m) / x to high
            // relative accuracy; summed over arms this is the replica's
            // stopping bias. Capped arms additionally report their raw dip
            // bound as untrusted truncation mass.
            let m = best[0];
            let mut bias = 0.0;
            let mut capped_excess = 0.0;
            for i in 0..2 {
                let b = 2.0 * dip_law.v(m) / height_sq[i].sqrt();
                bias += b;
                if capped[i] {
                    capped_excess += b;
                }
            }
            (best, bias, capped_excess)
        })
        .collect();

    let mut samples = Vec::with_capacity(reps * (k + 1));
    let mut bias_sum = 0.0;
    let mut capped_sum = 0.0;
    for (row, bias, capped_excess) in &rows {
        samples.extend_from_slice(row);
        bias_sum += bias;
        capped_sum += capped_excess;
    }
    let mut means = vec![0.0; k + 1];
    let mut sq = vec![0.0; k + 1];
    for row in samples.chunks_exact(k + 1) {
        for (j, v) in row.iter().enumerate() {
            means[j] += v;
            sq[j] += v * v;
        }
    }
    let n = reps as f64;
    for j in 0..=k {
        means[j] /= n;
        sq[j] = ((sq[j] / n - means[j] * means[j]).max(0.0) / n).sqrt();
    }
    // The correction's relative error is O((m/x)^2) at stop height x, far
    // below 5%; keep 5% of it plus all capped mass as the operative
    // truncation bound.
    let truncation_bound = 0.05 * bias_sum / n + capped_sum / n;
    ValleyMcResult {
        k,
        reps,
        samples,
        means,
        std_errors: sq,
        min_bias_estimate: bias_sum / n,
        truncation_bound,
        insufficient_horizon: truncation_bound > 1e-4,
    }
}

/// Result of the discretization experiment: samples of the gap between the
/// embedded walk's minimum and the fine-grid Brownian minimum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscretizationResult {
    pub n: usize,
    pub substeps: usize,
    pub reps: usize,
    pub samples: Vec<f64>,
    pub mean: f64,
    pub std_error: f64,
}

/// Simulate Brownian paths on `n * substeps` fine points, extract the
/// embedded unit-variance walk at integer times, and return the law of
/// `min(walk) - min(fine path)`.
///
/// The fine-grid minimum sits above the true Brownian minimum by
/// `O(1/sqrt(substeps))` in mean, which is the documented bias of this
/// experiment.
pub fn discretization_experiment(
    n: usize,
    substeps: usize,
    reps: usize,
    seed: u64,
) -> DiscretizationResult {
    assert!(substeps >= 100, "substeps too coarse for the embedded comparison");
    let samples: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let sd = 1.0 / (substeps as f64).sqrt();
            let mut b = 0.0f64;
            let mut fine_min = 0.0f64;
            let mut walk_min = 0.0f64;
            for _ in 0..n {
                for _ in 0..substeps {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    b += sd * z;
                    if b < fine_min {
                        fine_min = b;
                    }
                }
                if b < walk_min {
                    walk_min = b;
                }
            }
            walk_min - fine_min
        })
        .collect();
    let n_f = reps as f64;
    let mean = samples.iter().sum::<f64>() / n_f;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n_f;
    DiscretizationResult {
        n,
        substeps,
        reps,
        samples,
        mean,
        std_error: (var / n_f).sqrt(),
    }
}
