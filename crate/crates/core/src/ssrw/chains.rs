//! Markov kernels of the two Feller chains of the simple symmetric walk,
//! exact occupation samplers built on them, and walk-based oracles.
//!
//! The upward chain moves from `x >= 1` to `x+1` with probability
//! `(x+1)/(2x)` and to `x-1` with probability `(x-1)/(2x)`; the negated
//! downward chain moves from `y >= 0` to `y+1` with probability
//! `(y+2)/(2(y+1))` and to `y-1` otherwise. Both are transient, and their
//! exact downward-reach probabilities (`y/x`, resp. `(y+1)/(x+1)`) allow
//! occupation counts of a bounded level set to be sampled without bias: once
//! the chain sits above the level set, the event that it ever returns is a
//! single Bernoulli draw, and on a return the chain re-enters at the top
//! level.

use rand::Rng;

/// One step of the upward chain from `x >= 1`.
pub fn upward_chain_step<R: Rng>(x: u64, rng: &mut R) -> u64 {
    assert!(x >= 1, "upward chain lives on {{1,2,..}}");
    // up with probability (x+1)/(2x)
    if rng.random::<f64>() * ((2 * x) as f64) < (x + 1) as f64 {
        x + 1
    } else {
        x - 1
    }
}

/// One step of the negated downward chain from `y >= 0`.
pub fn downward_chain_step<R: Rng>(y: u64, rng: &mut R) -> u64 {
    // Up with probability (y+2)/(2(y+1)); at y = 0 that is 1 and the uniform
    // draw lies in [0,1), so the y-1 branch is unreachable there.
    if rng.random::<f64>() * ((2 * (y + 1)) as f64) < (y + 2) as f64 {
        y + 1
    } else {
        y - 1
    }
}

/// `P(upward chain from x ever reaches y)` for `y <= x`.
pub fn upward_reach_probability(x: u64, y: u64) -> f64 {
    assert!(y <= x && y >= 1);
    y as f64 / x as f64
}

/// `P(negated downward chain from x ever reaches y)` for `y <= x`.
pub fn downward_reach_probability(x: u64, y: u64) -> f64 {
    assert!(y <= x);
    (y + 1) as f64 / (x + 1) as f64
}

/// Total occupation of levels `1..=k` by the upward chain (time 0 at level 0
/// excluded), sampled exactly.
pub fn upward_occupation<R: Rng>(k: u64, rng: &mut R) -> u64 {
    if k == 0 {
        return 0;
    }
    let mut count = 0u64;
    let mut x = 1u64; // forced first step 0 -> 1
    count += 1;
    loop {
        if x > k {
            // Ever return to the level set? Exact probability k/x; a return
            // re-enters at level k.
            if rng.random::<f64>() * (x as f64) < k as f64 {
                x = k;
                count += 1;
            } else {
                return count;
            }
        } else {
            x = upward_chain_step(x, rng);
            if x <= k {
                count += 1;
            }
        }
    }
}

/// Total occupation of levels `0..=k` by the negated downward chain,
/// including its time-0 value 0, sampled exactly.
pub fn downward_occupation<R: Rng>(k: u64, rng: &mut R) -> u64 {
    let mut count = 1u64; // Y_0 = 0
    let mut y = 0u64;
    loop {
        if y > k {
            if rng.random::<f64>() * ((y + 1) as f64) < (k + 1) as f64 {
                y = k;
                count += 1;
            } else {
                return count;
            }
        } else {
            y = downward_chain_step(y, rng);
            if y <= k {
                count += 1;
            }
        }
    }
}

/// One exact sample of `eta_k`, the number of limiting order statistics at
/// or below level `k` (the minimum itself included).
pub fn eta_sample<R: Rng>(k: u64, rng: &mut R) -> u64 {
    upward_occupation(k, rng) + downward_occupation(k, rng)
}

/// Per-level visit counts `(levels 0..=m)` of the upward chain, exact.
/// The count at level 0 is always zero: the chain starts there and never
/// returns.
pub fn upward_level_counts<R: Rng>(m: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; m as usize + 1];
    if m == 0 {
        return counts;
    }
    let mut x = 1u64;
    counts[1] += 1;
    loop {
        if x > m {
            if rng.random::<f64>() * (x as f64) < m as f64 {
                x = m;
                counts[m as usize] += 1;
            } else {
                return counts;
            }
        } else {
            x = upward_chain_step(x, rng);
            if x <= m {
                counts[x as usize] += 1;
            }
        }
    }
}

/// Per-level visit counts `(levels 0..=m)` of the negated downward chain,
/// exact, including the time-0 visit to 0.
pub fn downward_level_counts<R: Rng>(m: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; m as usize + 1];
    counts[0] = 1;
    let mut y = 0u64;
    loop {
        if y > m {
            if rng.random::<f64>() * ((y + 1) as f64) < (m + 1) as f64 {
                y = m;
                counts[m as usize] += 1;
            } else {
                return counts;
            }
        } else {
            y = downward_chain_step(y, rng);
            if y <= m {
                counts[y as usize] += 1;
            }
        }
    }
}

/// Exact per-level counts of the combined limiting order statistics,
/// `L_l = L^up_l + L^down_l` for `l = 0..=m`.
pub fn combined_level_counts<R: Rng>(m: u64, rng: &mut R) -> Vec<u64> {
    let up = upward_level_counts(m, rng);
    let down = downward_level_counts(m, rng);
    up.iter().zip(down.iter()).map(|(a, b)| a + b).collect()
}

/// Occupation counts of levels `0..=m` extracted from a finite-horizon
/// simple-walk simulation routed into its Feller chains on the fly.
///
/// This is the decomposition oracle: it is slightly biased low because a
/// chain may revisit the level set after the horizon, with probability
/// `O(m / sqrt(horizon))`.
pub fn walk_occupation_oracle<R: Rng>(horizon: usize, m: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; m as usize + 1];
    counts[0] = 1; // -S^down_0 = 0
    let mut s: i64 = 0;
    let mut s_up: i64 = 0;
    let mut s_down: i64 = 0;
    let mut steps = 0usize;
    'outer: loop {
        let mut word: u64 = rng.random();
        for _ in 0..64 {
            let x = ((word & 1) as i64) * 2 - 1;
            word >>= 1;
            s += x;
            if s > 0 {
                s_up += x;
                if s_up as u64 <= m {
                    counts[s_up as usize] += 1;
                }
            } else {
                s_down += x;
                let y = (-s_down) as u64;
                if y <= m {
                    counts[y as usize] += 1;
                }
            }
            steps += 1;
            if steps >= horizon {
                break 'outer;
            }
        }
    }
    counts
}

/// Per-level upcrossing counts (`level -> level+1`, levels `0..=m`) of both
/// chains of a finite-horizon simple-walk simulation: the walk-based oracle
/// for the branching representation of upcrossings. Slightly biased low for
/// the same reason as [`walk_occupation_oracle`].
pub fn walk_upcrossing_oracle<R: Rng>(
    horizon: usize,
    m: u64,
    rng: &mut R,
) -> (Vec<u64>, Vec<u64>) {
    let mut up_counts = vec![0u64; m as usize + 1];
    let mut down_counts = vec![0u64; m as usize + 1];
    let mut s: i64 = 0;
    let mut s_up: i64 = 0;
    let mut s_down: i64 = 0;
    let mut steps = 0usize;
    'outer: loop {
        let mut word: u64 = rng.random();
        for _ in 0..64 {
            let x = ((word & 1) as i64) * 2 - 1;
            word >>= 1;
            s += x;
            if s > 0 {
                let prev = s_up;
                s_up += x;
                if x == 1 && prev >= 0 && (prev as u64) <= m {
                    up_counts[prev as usize] += 1;
                }
            } else {
                let prev = -s_down;
                s_down += x;
                if x == -1 && prev >= 0 && (prev as u64) <= m {
                    down_counts[prev as usize] += 1;
                }
            }
            steps += 1;
            if steps >= horizon {
                break 'outer;
            }
        }
    }
    (up_counts, down_counts)
}

/// Number of steps `j <= tau_k` with `S_j >= 0`, for `tau_k` the first
/// passage of the walk to `+k`. Returns `None` when the passage has not
/// happened within `cap` steps (heavy-tailed passage times make a cap
/// necessary; dropped samples are rare and reported by the caller).
pub fn nonneg_count_at_passage<R: Rng>(k: i64, cap: usize, rng: &mut R) -> Option<u64> {
    assert!(k >= 1);
    let mut s: i64 = 0;
    let mut count = 0u64;
    let mut steps = 0usize;
    loop {
        let mut word: u64 = rng.random();
        for _ in 0..64 {
            let x = ((word & 1) as i64) * 2 - 1;
            word >>= 1;
            s += x;
            steps += 1;
            if s >= 0 {
                count += 1;
            }
            if s == k {
                return Some(count);
            }
            if steps >= cap {
                return None;
            }
        }
    }
}

/// First passage time of the reflected walk `S - min(S)` to level `k`.
pub fn reflected_passage_time<R: Rng>(k: i64, rng: &mut R) -> u64 {
    assert!(k >= 1);
    let mut s: i64 = 0;
    let mut min: i64 = 0;
    let mut steps = 0u64;
    loop {
        let mut word: u64 = rng.random();
        for _ in 0..64 {
            let x = ((word & 1) as i64) * 2 - 1;
            word >>= 1;
            s += x;
            min = min.min(s);
            steps += 1;
            if s - min == k {
                return steps;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn upward_step_from_one_is_forced() {
        let mut rng = rng_from_seed(1);
        for _ in 0..50 {
            assert_eq!(upward_chain_step(1, &mut rng), 2);
        }
    }

    #[test]
    fn chains_stay_positive() {
        let mut rng = rng_from_seed(2);
        let mut x = 1u64;
        for _ in 0..20_000 {
            x = upward_chain_step(x, &mut rng);
            assert!(x >= 1);
        }
        let mut y = 0u64;
        for _ in 0..20_000 {
            y = downward_chain_step(y, &mut rng);
        }
    }

    #[test]
    fn downward_occupation_of_zero_is_geometric() {
        // L^down_0 ~ Geo1(1/2): mean 2.
        let mut rng = rng_from_seed(4);
        let n = 200_000;
        let mean: f64 =
            (0..n).map(|_| downward_occupation(0, &mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 2.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn upward_occupation_of_level_one_is_geometric() {
        // eta^up_1 = visits to level 1 ~ Geo1(1/2): mean 2.
        let mut rng = rng_from_seed(6);
        let n = 200_000;
        let mean: f64 =
            (0..n).map(|_| upward_occupation(1, &mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 2.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn eta_mean_matches_generating_function_derivative() {
        // E eta_k = V'_k(1) + V'_{k+1}(1) = k(k+1) + (k+1)(k+2).
        let mut rng = rng_from_seed(9);
        let n = 200_000;
        for k in 1..=3u64 {
            let mean: f64 =
                (0..n).map(|_| eta_sample(k, &mut rng) as f64).sum::<f64>() / n as f64;
            let expect = (k * (k + 1) + (k + 1) * (k + 2)) as f64;
            assert!(
                (mean - expect).abs() < 0.05 * expect,
                "k = {k}: mean {mean}, expect {expect}"
            );
        }
    }

    #[test]
    fn level_counts_sum_to_occupation() {
        let mut rng = rng_from_seed(12);
        for _ in 0..500 {
            let up = upward_level_counts(3, &mut rng);
            assert_eq!(up[0], 0, "upward chain never revisits 0");
        }
    }
}
