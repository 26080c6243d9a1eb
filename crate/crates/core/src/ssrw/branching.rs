//! Branching-process representations of the occupation counts of the
//! limiting order statistics of the simple symmetric walk.
//!
//! `L_l` counts the limiting order statistics equal to level `l`. It splits
//! into the occupation counts of the two chains, whose level-upcrossing
//! counts evolve as geometric-offspring branching processes with single
//! immigration; the combined process has double immigration, giving
//! `L_l = Z_{l-1} + Z_l - 2` with `Z_{-1} = 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Geometric on `{0,1,..}` with success 1/2: `P(Y = k) = 2^{-(k+1)}`.
///
/// Sampled as the number of trailing zero bits of a nonzero 64-bit word,
/// which is exact and branch-light.
pub fn geo0_half<R: Rng>(rng: &mut R) -> u64 {
    let mut total = 0u64;
    loop {
        let w: u64 = rng.random();
        if w != 0 {
            return total + w.trailing_zeros() as u64;
        }
        total += 64;
    }
}

/// Geometric on `{1,2,..}` with success 1/2: `P(Y = k) = 2^{-k}`.
pub fn geo1_half<R: Rng>(rng: &mut R) -> u64 {
    geo0_half(rng) + 1
}

/// Geometric on `{1,2,..}`: `P(Y = k) = p (1-p)^{k-1}` by inverse transform.
pub fn geo1<R: Rng>(p: f64, rng: &mut R) -> u64 {
    assert!(p > 0.0 && p <= 1.0);
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let g = (u.ln() / (1.0 - p).ln()).ceil();
    (g as u64).max(1)
}

pub fn bernoulli<R: Rng>(p: f64, rng: &mut R) -> bool {
    debug_assert!((0.0..=1.0).contains(&p));
    rng.random::<f64>() < p
}

/// Branching process with constant immigration per generation and
/// `Geo0(1/2)` offspring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchingConfig {
    /// 0, 1 or 2 immigrants per generation.
    pub immigration: u8,
    /// Value the emitted sequence starts from.
    pub initial: u64,
}

impl BranchingConfig {
    pub fn new(immigration: u8, initial: u64) -> Self {
        assert!(immigration <= 2, "immigration must be 0, 1 or 2");
        BranchingConfig { immigration, initial }
    }

    fn step<R: Rng>(&self, z: u64, rng: &mut R) -> u64 {
        let mut next = self.immigration as u64;
        for _ in 0..z {
            next += geo0_half(rng);
        }
        next
    }

    /// Emit `initial, Z_1, .., Z_levels` (length `levels + 1`).
    pub fn sample_levels<R: Rng>(&self, levels: usize, rng: &mut R) -> Vec<u64> {
        let mut out = Vec::with_capacity(levels + 1);
        let mut z = self.initial;
        out.push(z);
        for _ in 0..levels {
            z = self.step(z, rng);
            out.push(z);
        }
        out
    }
}

/// One sample of the combined occupation process: `Z_{-1} = 1, Z_0, ..,
/// Z_{levels}` under double immigration (length `levels + 2`).
pub fn sample_double_immigration<R: Rng>(levels: usize, rng: &mut R) -> Vec<u64> {
    BranchingConfig::new(2, 1).sample_levels(levels + 1, rng)
}

/// Upcrossing-count chains of the two Feller chains: the upward one starts
/// at 1 deterministically (the chain leaves 0 for 1 and never returns), the
/// downward one starts geometric on `{1,2,..}` — the same process shifted
/// one step forward in time. Both evolve independently with single
/// immigration.
pub fn sample_knight_chains<R: Rng>(levels: usize, rng: &mut R) -> (Vec<u64>, Vec<u64>) {
    let up = BranchingConfig::new(1, 1).sample_levels(levels, rng);
    let down = BranchingConfig::new(1, geo1_half(rng)).sample_levels(levels, rng);
    (up, down)
}

/// Occupation counts of successive levels together with their partial sums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupationCounts {
    /// `L_0, L_1, .., L_m` (`L_0 >= 1`).
    pub l: Vec<u64>,
    /// `eta_j = L_0 + .. + L_j`, nondecreasing.
    pub eta: Vec<u64>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BranchingError {
    #[error("double-immigration sample must start at Z_{{-1}} = 1, got {0}")]
    BadStart(u64),
    #[error("double-immigration values must be >= 2 after the start, got {0}")]
    BadValue(u64),
    #[error("need at least two values to form one occupation count")]
    TooShort,
}

/// Convert a double-immigration sample `(Z_{-1}, Z_0, ..)` into occupation
/// counts `L_l = Z_{l-1} + Z_l - 2`.
pub fn occupation_from_branching(z: &[u64]) -> Result<OccupationCounts, BranchingError> {
    if z.len() < 2 {
        return Err(BranchingError::TooShort);
    }
    if z[0] != 1 {
        return Err(BranchingError::BadStart(z[0]));
    }
    for &v in &z[1..] {
        if v < 2 {
            return Err(BranchingError::BadValue(v));
        }
    }
    let l: Vec<u64> = z.windows(2).map(|w| w[0] + w[1] - 2).collect();
    let eta = l
        .iter()
        .scan(0u64, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    Ok(OccupationCounts { l, eta })
}

/// Exact joint law of `(L_0, L_1)` under the double-immigration
/// representation, with both coordinates saturated at the given caps (all
/// mass beyond a cap folds into it, so the masses sum to exactly 1).
///
/// `L_0 = Z_0 - 1` is geometric, and given `Z_0` the next count is
/// `L_1 = Z_0 + 1 + NB(Z_0, 1/2)` for a negative binomial on `{0,1,..}`.
pub fn exact_l0_l1_pmf(cap0: u64, cap1: u64) -> crate::ssrw::pmf::ExactPmf<(u64, u64)> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use std::collections::BTreeMap;

    // Beyond k_max >= cap1 every outcome saturates both coordinates, since
    // L_1 >= L_0 + 1; folding the whole geometric tail there stays exact.
    let k_max = cap1.max(cap0) + 1;
    let mut masses: BTreeMap<(u64, u64), BigRational> = BTreeMap::new();
    let mut add = |key: (u64, u64), m: BigRational| {
        *masses.entry(key).or_insert_with(BigRational::zero) += m;
    };
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut geo = half.clone(); // P(L_0 = 1) = 1/2
    for k in 1..=k_max {
        let key0 = k.min(cap0);
        // P(NB(k+1, 1/2) = s) = C(s + k, k) 2^{-(k+1+s)}; L_1 = k + 1 + s.
        let mut nb = BigRational::new(BigInt::from(1), BigInt::from(2u64).pow(k as u32 + 1));
        let mut below_cap = BigRational::zero();
        let mut s = 0u64;
        while k + 1 + s < cap1 {
            add((key0, k + 1 + s), geo.clone() * &nb);
            below_cap += &nb;
            // C(s+1+k, k)/C(s+k, k) = (s+1+k)/(s+1), times the extra 1/2.
            nb = nb * BigRational::new(BigInt::from(s + 1 + k), BigInt::from(2 * (s + 1)));
            s += 1;
        }
        add((key0, cap1), geo.clone() * (BigRational::one() - below_cap));
        geo *= &half;
    }
    // Whole remaining geometric tail: L_0 > k_max >= cap0 and L_1 > cap1.
    let tail = BigRational::new(BigInt::from(1), BigInt::from(2u64).pow(k_max as u32));
    add((cap0, cap1), tail);
    crate::ssrw::pmf::ExactPmf::from_masses(masses)
}

/// Sample `L_l` conditionally on `L_0 = k`: the independent sum
/// `G_0 + G_k + sum_{i<k} B_i G_i` of geometric variables on `{1,2,..}`
/// with success `1/(2l)`, thinned by Bernoulli(`1/l`) coins in the middle.
pub fn conditional_occupation<R: Rng>(level: u64, k: u64, rng: &mut R) -> u64 {
    assert!(level >= 1 && k >= 1);
    let p = 1.0 / (2.0 * level as f64);
    let thin = 1.0 / level as f64;
    let mut total = geo1(p, rng) + geo1(p, rng);
    for _ in 1..k {
        if bernoulli(thin, rng) {
            total += geo1(p, rng);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn geo_conventions() {
        let mut rng = rng_from_seed(11);
        let n = 200_000;
        let mut sum0 = 0u64;
        let mut min1 = u64::MAX;
        let mut sum1 = 0u64;
        for _ in 0..n {
            sum0 += geo0_half(&mut rng);
            let g = geo1(0.25, &mut rng);
            min1 = min1.min(g);
            sum1 += g;
        }
        let mean0 = sum0 as f64 / n as f64;
        assert!((mean0 - 1.0).abs() < 0.02, "Geo0(1/2) mean {mean0}");
        assert!(min1 >= 1);
        let mean1 = sum1 as f64 / n as f64;
        assert!((mean1 - 4.0).abs() < 0.05, "Geo1(1/4) mean {mean1}");
    }

    #[test]
    fn no_immigration_from_zero_is_absorbing() {
        let mut rng = rng_from_seed(3);
        let z = BranchingConfig::new(0, 0).sample_levels(20, &mut rng);
        assert!(z.iter().all(|v| *v == 0));
    }

    #[test]
    fn double_immigration_start_is_geometric_lowest_count() {
        // P(L_0 = k) = 2^{-k}: check the mean of L_0 = Z_0 - 1 is close to 2.
        let mut rng = rng_from_seed(5);
        let n = 100_000;
        let mut sum = 0u64;
        for _ in 0..n {
            let z = sample_double_immigration(0, &mut rng);
            let occ = occupation_from_branching(&z).unwrap();
            assert!(occ.l[0] >= 1);
            sum += occ.l[0];
        }
        let mean = sum as f64 / n as f64;
        assert!((mean - 2.0).abs() < 0.03, "E L_0 = {mean}");
    }

    #[test]
    fn occupation_substitution() {
        // (Z_{-1}, Z_0, Z_1) = (1, 2, 2) -> L_0 = 1, L_1 = 2.
        let occ = occupation_from_branching(&[1, 2, 2]).unwrap();
        assert_eq!(occ.l, vec![1, 2]);
        assert_eq!(occ.eta, vec![1, 3]);
        assert_eq!(occupation_from_branching(&[2, 2]), Err(BranchingError::BadStart(2)));
    }

    #[test]
    fn exact_l0_l1_matches_sampler() {
        use crate::stats::dist::DiscreteDist;
        let cap0 = 10;
        let cap1 = 20;
        let pmf = exact_l0_l1_pmf(cap0, cap1);
        let mut rng = rng_from_seed(311);
        let n = 200_000;
        let samples: Vec<(u64, u64)> = (0..n)
            .map(|_| {
                let z = sample_double_immigration(1, &mut rng);
                let occ = occupation_from_branching(&z).unwrap();
                (occ.l[0].min(cap0), occ.l[1].min(cap1))
            })
            .collect();
        let dist = DiscreteDist::from_samples(samples).unwrap();
        let tv = dist.tv_vs_exact(&pmf);
        assert!(tv < 0.01, "sampler vs exact law: tv = {tv}");
    }

    #[test]
    fn conditional_occupation_means() {
        let mut rng = rng_from_seed(8);
        let n = 100_000;
        // k=1: two Geo1(1/(2l)) variables, mean 4l. l=2 -> 8.
        let mean: f64 =
            (0..n).map(|_| conditional_occupation(2, 1, &mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 8.0).abs() < 0.1, "mean {mean}");
        // l=1: degenerate thinning, k+1 Geo1(1/2) variables, mean 2(k+1).
        let mean: f64 =
            (0..n).map(|_| conditional_occupation(1, 3, &mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 8.0).abs() < 0.1, "mean {mean}");
    }
}
