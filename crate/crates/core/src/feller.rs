//! Feller-chain decomposition of a walk and the limiting order statistics.
//!
//! The upward chain collects, in order, the increments `X_k` of the walk at
//! steps with `S_k > 0`; the downward chain collects those with `S_k <= 0`.
//! The walk is an exact function of the two chains, and near its minimum the
//! shifted order statistics converge to the order statistics of the combined
//! chain values. This module implements both exact recovery algorithms
//! (reverse induction over the step counts, and the riffle of ascending /
//! descending chain segments), ladder variables, and a sampler for the
//! limiting order statistics `W_1..W_K`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::rng_from_seed;
use crate::walk::{IncrementSpec, WalkError, WalkPath};

#[derive(Debug, Error, PartialEq)]
pub enum FellerError {
    #[error("inconsistent Feller pair: {0}")]
    InconsistentPair(String),
    #[error("malformed chain segment: {0}")]
    MalformedSegment(String),
    #[error("increment spec has nonzero drift; limiting order statistics need a centered walk")]
    Drift,
    #[error(transparent)]
    Walk(#[from] WalkError),
}

/// Upward and downward chains extracted from a walk: the running values of
/// each chain, the routed increments verbatim, and the per-step routing
/// bits.
///
/// The increments are stored as sampled so that recovery reproduces the
/// original walk bit for bit; the value sequences are their running sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FellerPair {
    /// `S^up_0 = 0, S^up_1, ..`; every value after index 0 is `> 0`.
    pub up: Vec<f64>,
    /// `S^down_0 = 0, S^down_1, ..`; every value is `<= 0`.
    pub down: Vec<f64>,
    /// The walk increments routed to the upward chain, in order.
    pub up_increments: Vec<f64>,
    /// The walk increments routed to the downward chain, in order.
    pub down_increments: Vec<f64>,
    /// `indicator[k-1] = (S_k > 0)` for `k = 1..n`.
    pub indicator: Vec<bool>,
}

impl FellerPair {
    pub fn n_plus(&self) -> usize {
        self.up.len() - 1
    }

    pub fn n_minus(&self) -> usize {
        self.down.len() - 1
    }

    pub fn n(&self) -> usize {
        self.n_plus() + self.n_minus()
    }

    fn validate(&self) -> Result<(), FellerError> {
        if self.up.first() != Some(&0.0) || self.down.first() != Some(&0.0) {
            return Err(FellerError::InconsistentPair("chains must start at 0".into()));
        }
        if self.up.len() != self.up_increments.len() + 1
            || self.down.len() != self.down_increments.len() + 1
        {
            return Err(FellerError::InconsistentPair("value/increment lengths disagree".into()));
        }
        if self.up.iter().skip(1).any(|v| *v <= 0.0) {
            return Err(FellerError::InconsistentPair("upward chain value <= 0".into()));
        }
        if self.down.iter().any(|v| *v > 0.0) {
            return Err(FellerError::InconsistentPair("downward chain value > 0".into()));
        }
        let mut s = 0.0;
        for (x, v) in self.up_increments.iter().zip(self.up.iter().skip(1)) {
            s += x;
            if s != *v {
                return Err(FellerError::InconsistentPair("upward values are not the running sums".into()));
            }
        }
        let mut s = 0.0;
        for (x, v) in self.down_increments.iter().zip(self.down.iter().skip(1)) {
            s += x;
            if s != *v {
                return Err(FellerError::InconsistentPair("downward values are not the running sums".into()));
            }
        }
        Ok(())
    }

    /// Ascending chain segments of the upward chain, carrying the verbatim
    /// increments.
    pub fn ascending_segments(&self) -> Vec<ChainSegment> {
        segments_with_increments(&self.up, &self.up_increments, SegmentKind::Ascending)
    }

    /// Descending chain segments of the downward chain.
    pub fn descending_segments(&self) -> Vec<ChainSegment> {
        segments_with_increments(&self.down, &self.down_increments, SegmentKind::Descending)
    }
}

/// Split a walk into its two Feller chains.
pub fn decompose(path: &WalkPath) -> FellerPair {
    let mut up = Vec::with_capacity(path.n() / 2 + 1);
    let mut down = Vec::with_capacity(path.n() / 2 + 1);
    let mut up_increments = Vec::with_capacity(path.n() / 2);
    let mut down_increments = Vec::with_capacity(path.n() / 2);
    let mut indicator = Vec::with_capacity(path.n());
    up.push(0.0);
    down.push(0.0);
    let mut s_up = 0.0;
    let mut s_down = 0.0;
    for (x, s) in path.increments().iter().zip(path.sums().iter().skip(1)) {
        if *s > 0.0 {
            s_up += x;
            up.push(s_up);
            up_increments.push(*x);
            indicator.push(true);
        } else {
            s_down += x;
            down.push(s_down);
            down_increments.push(*x);
            indicator.push(false);
        }
    }
    FellerPair { up, down, up_increments, down_increments, indicator }
}

/// Invert [`decompose`] by reverse induction on the step counts.
///
/// The final walk value is `up.last() + down.last()`; its sign tells which
/// chain received the last step, which peels one value off that chain, and so
/// on down to `S_1`. The routing found that way dictates how the stored
/// increments riffle back together.
pub fn recover_reverse_induction(pair: &FellerPair) -> Result<WalkPath, FellerError> {
    pair.validate()?;
    let n = pair.n();
    let mut ip = pair.n_plus();
    let mut im = pair.n_minus();
    let mut from_up_rev = Vec::with_capacity(n);
    for _ in 0..n {
        let s = pair.up[ip] + pair.down[im];
        if s > 0.0 {
            if ip == 0 {
                return Err(FellerError::InconsistentPair(
                    "positive sum with exhausted upward chain".into(),
                ));
            }
            from_up_rev.push(true);
            ip -= 1;
        } else {
            if im == 0 {
                return Err(FellerError::InconsistentPair(
                    "nonpositive sum with exhausted downward chain".into(),
                ));
            }
            from_up_rev.push(false);
            im -= 1;
        }
    }
    if ip != 0 || im != 0 {
        return Err(FellerError::InconsistentPair("counts did not drain to zero".into()));
    }
    let mut increments = Vec::with_capacity(n);
    let mut i_up = 0;
    let mut i_down = 0;
    for from_up in from_up_rev.iter().rev() {
        if *from_up {
            increments.push(pair.up_increments[i_up]);
            i_up += 1;
        } else {
            increments.push(pair.down_increments[i_down]);
            i_down += 1;
        }
    }
    Ok(WalkPath::from_increments(increments)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    Ascending,
    Descending,
}

/// One ascending (or descending) chain segment, endpoints included; the
/// values are chain coordinates, so consecutive segments share an endpoint.
/// The increments are carried verbatim so reconstruction is bit-exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSegment {
    pub values: Vec<f64>,
    pub increments: Vec<f64>,
    pub kind: SegmentKind,
}

impl ChainSegment {
    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("segment nonempty")
    }

    pub fn initial_value(&self) -> f64 {
        self.values[0]
    }
}

/// Split a chain at its future-minimum times (ascending) or future-maximum
/// times (descending).
///
/// For the ascending case, `G_j` is the last index after `G_{j-1}` attaining
/// the minimum of the remaining values; each segment runs from one split
/// point to the next, and the segment finals strictly increase.
pub fn chain_segments(values: &[f64], kind: SegmentKind) -> Vec<ChainSegment> {
    let increments: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    segments_with_increments(values, &increments, kind)
}

fn segments_with_increments(
    values: &[f64],
    increments: &[f64],
    kind: SegmentKind,
) -> Vec<ChainSegment> {
    assert!(!values.is_empty() && values[0] == 0.0, "chain must start at 0");
    assert_eq!(values.len(), increments.len() + 1);
    let mut segments = Vec::new();
    let mut start = 0usize;
    let n = values.len() - 1;
    while start < n {
        let mut best = start + 1;
        for i in (start + 1)..=n {
            let better = match kind {
                SegmentKind::Ascending => values[i] <= values[best],
                SegmentKind::Descending => values[i] >= values[best],
            };
            if better {
                best = i;
            }
        }
        segments.push(ChainSegment {
            values: values[start..=best].to_vec(),
            increments: increments[start..best].to_vec(),
            kind,
        });
        start = best;
    }
    segments
}

/// Reassemble a walk from the ascending and descending segments of its two
/// Feller chains: segments are placed in order of least absolute final
/// value, ascending before descending on ties.
pub fn riffle_reconstruct(
    ascending: &[ChainSegment],
    descending: &[ChainSegment],
) -> Result<WalkPath, FellerError> {
    for seg in ascending {
        if seg.kind != SegmentKind::Ascending
            || seg.values.len() < 2
            || seg.increments.len() + 1 != seg.values.len()
        {
            return Err(FellerError::MalformedSegment("bad ascending segment".into()));
        }
        if seg.final_value() <= seg.initial_value() {
            return Err(FellerError::MalformedSegment(
                "ascending segment must end strictly above its start".into(),
            ));
        }
    }
    for seg in descending {
        if seg.kind != SegmentKind::Descending
            || seg.values.len() < 2
            || seg.increments.len() + 1 != seg.values.len()
        {
            return Err(FellerError::MalformedSegment("bad descending segment".into()));
        }
        if seg.final_value() > seg.initial_value() {
            return Err(FellerError::MalformedSegment(
                "descending segment must end at or below its start".into(),
            ));
        }
    }
    let mut order: Vec<&ChainSegment> = ascending.iter().chain(descending.iter()).collect();
    order.sort_by(|a, b| {
        a.final_value()
            .abs()
            .total_cmp(&b.final_value().abs())
            .then_with(|| match (a.kind, b.kind) {
                (SegmentKind::Ascending, SegmentKind::Descending) => std::cmp::Ordering::Less,
                (SegmentKind::Descending, SegmentKind::Ascending) => std::cmp::Ordering::Greater,
                _ => std::cmp::Ordering::Equal,
            })
    });
    let mut increments = Vec::new();
    for seg in order {
        increments.extend_from_slice(&seg.increments);
    }
    Ok(WalkPath::from_increments(increments)?)
}

/// Strict ascending and weak descending ladder epochs and heights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRecord {
    /// `(epoch, height)` at successive times `S` strictly exceeds all
    /// previous values (the first requires `S > 0`). Heights strictly
    /// increase.
    pub strict_ascending: Vec<(usize, f64)>,
    /// `(epoch, height)` at successive times `S` reaches a weakly lower
    /// value than ever before (the first requires `S <= 0`). Heights are
    /// nonincreasing.
    pub weak_descending: Vec<(usize, f64)>,
}

pub fn ladder_variables(path: &WalkPath) -> LadderRecord {
    let mut strict_ascending = Vec::new();
    let mut weak_descending = Vec::new();
    let mut cur_max = 0.0f64;
    let mut cur_min = 0.0f64;
    for (k, s) in path.sums().iter().enumerate().skip(1) {
        if *s > cur_max {
            strict_ascending.push((k, *s));
            cur_max = *s;
        }
        if *s <= cur_min {
            weak_descending.push((k, *s));
            cur_min = *s;
        }
    }
    LadderRecord { strict_ascending, weak_descending }
}

/// The fragments of a walk on either side of the last argmin, both shifted
/// to start at 0: `(S_{a+k} - S_a, 0 <= k <= n-a)` and
/// `(S_{a-k} - S_a, 0 <= k <= a)` for `a` the last index attaining the
/// minimum. At every fixed length these have, jointly, the law of the
/// upward chain and the negated downward chain.
pub fn split_at_argmin(path: &WalkPath) -> (Vec<f64>, Vec<f64>) {
    let sums = path.sums();
    let min = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let mut argmin = 0;
    for (k, s) in sums.iter().enumerate() {
        if *s == min {
            argmin = k;
        }
    }
    let post: Vec<f64> = (argmin..sums.len()).map(|k| sums[k] - sums[argmin]).collect();
    let pre: Vec<f64> = (0..=argmin).rev().map(|k| sums[k] - sums[argmin]).collect();
    (post, pre)
}

/// First `K` limiting order statistics above the minimum, with the
/// certification record of the stopping rule used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitOrderStats {
    /// `W_1 <= .. <= W_K` (the implicit `W_0 = 0` is not stored).
    pub w: Vec<f64>,
    /// Number of walk steps simulated.
    pub horizon_used: usize,
    /// True when the stopping rule fired before the horizon was exhausted.
    pub certified: bool,
    /// Proxy for the smallest chain value still to come: the minimum over
    /// the trailing halves of both simulated chains.
    pub guard: f64,
}

/// Simulate the limiting order statistics `W_1..W_K` of a centered walk.
///
/// The walk is simulated and routed into its two Feller chains on the fly;
/// the candidate `W`s are the `K` smallest values of
/// `{-S^down_j, j >= 0} u {S^up_j, j >= 1}`. The run stops early (and is
/// marked certified) once both chains' current values exceed
/// `safety * W_K` and the minimum over the trailing half of each simulated
/// chain exceeds `W_K`; otherwise the best candidate at `max_horizon` is
/// returned with `certified = false`.
pub fn limit_order_stats(
    spec: &IncrementSpec,
    k: usize,
    max_horizon: usize,
    safety: f64,
    seed: u64,
) -> Result<LimitOrderStats, FellerError> {
    assert!(k >= 1, "K must be >= 1");
    assert!(max_horizon >= k, "horizon must be >= K");
    spec.validate()?;
    if !spec.is_centered() {
        return Err(FellerError::Drift);
    }
    let mut rng = rng_from_seed(seed);
    Ok(limit_order_stats_with(spec, k, max_horizon, safety, &mut rng))
}

/// As [`limit_order_stats`] but drawing from a caller-provided generator;
/// the spec must already be validated and centered.
pub fn limit_order_stats_with<R: Rng>(
    spec: &IncrementSpec,
    k: usize,
    max_horizon: usize,
    safety: f64,
    rng: &mut R,
) -> LimitOrderStats {
    // The k+1 smallest candidates (incl. the 0 from -S^down_0), kept sorted.
    let mut best: Vec<f64> = Vec::with_capacity(k + 2);
    best.push(0.0);

    let component = spec.resolve_component(rng).clone();
    let mut up: Vec<f64> = vec![0.0];
    let mut down_neg: Vec<f64> = vec![0.0]; // values of -S^down
    let mut s = 0.0f64;
    let mut s_up = 0.0f64;
    let mut s_down = 0.0f64;
    let mut steps = 0usize;
    let mut next_check = 64.max(4 * k);

    loop {
        while steps < next_check && steps < max_horizon {
            let x = component.draw(rng);
            steps += 1;
            s += x;
            let v = if s > 0.0 {
                s_up += x;
                up.push(s_up);
                s_up
            } else {
                s_down += x;
                down_neg.push(-s_down);
                -s_down
            };
            if best.len() <= k {
                let pos = best.partition_point(|b| *b <= v);
                best.insert(pos, v);
            } else if v < best[k] {
                best.pop();
                let pos = best.partition_point(|b| *b <= v);
                best.insert(pos, v);
            }
        }

        let done = steps >= max_horizon;
        if best.len() == k + 1 {
            let w_k = best[k];
            let up_cur = *up.last().expect("nonempty");
            let down_cur = *down_neg.last().expect("nonempty");
            let up_guard = trailing_half_min(&up);
            let down_guard = trailing_half_min(&down_neg);
            let guard = up_guard.min(down_guard);
            let certified = up.len() > 2
                && down_neg.len() > 2
                && up_cur > safety * w_k
                && down_cur > safety * w_k
                && up_guard > w_k
                && down_guard > w_k;
            if certified || done {
                return LimitOrderStats { w: best[1..].to_vec(), horizon_used: steps, certified, guard };
            }
        } else if done {
            let guard = trailing_half_min(&up).min(trailing_half_min(&down_neg));
            return LimitOrderStats { w: best[1..].to_vec(), horizon_used: steps, certified: false, guard };
        }
        next_check = next_check.saturating_mul(2);
    }
}

fn trailing_half_min(values: &[f64]) -> f64 {
    let start = values.len() / 2;
    values[start..].iter().copied().fold(f64::INFINITY, f64::min)
}

/// Tail of the limiting lowest gap `W_1` for an i.i.d.-increment walk:
/// the product of the ascending ladder-height tail and the descending
/// ladder-height tail at `w`.
pub fn w1_tail(
    ladder_tail_up: impl Fn(f64) -> f64,
    ladder_tail_down: impl Fn(f64) -> f64,
    w: f64,
) -> f64 {
    assert!(w > 0.0, "tail defined for w > 0");
    ladder_tail_up(w) * ladder_tail_down(w)
}
