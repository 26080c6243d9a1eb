//! Exact identities for the simple symmetric walk.
//!
//! The brute-force oracle enumerates all `2^n` sign sequences and tabulates
//! any statistic exactly; everything else here (central binomial terms, gap
//! expectations, the max-plus-min convolution, expected-maximum sums,
//! Chebyshev generating functions) is checked against it in the tests and in
//! the verification suite.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use super::pmf::ExactPmf;
use crate::walk::WalkPath;

/// Enumeration keeps under a minute up to here; tests default to `n <= 12`.
pub const MAX_ENUM_N: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum EnumError {
    #[error("enumeration limited to n <= {MAX_ENUM_N}, got {0}")]
    TooLarge(usize),
}

fn path_from_mask(mask: u32, n: usize) -> WalkPath {
    let increments: Vec<f64> =
        (0..n).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
    WalkPath::from_increments(increments).expect("finite increments")
}

/// Exact distribution of `stat` over all `2^n` equiprobable walks.
pub fn enumerate_statistic<K, F>(n: usize, stat: F) -> Result<ExactPmf<K>, EnumError>
where
    K: Ord + Clone + Send,
    F: Fn(&WalkPath) -> K + Sync,
{
    if n > MAX_ENUM_N {
        return Err(EnumError::TooLarge(n));
    }
    let total: u64 = 1 << n;
    let chunk: u64 = 1 << n.min(16);
    let counts = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|block| {
            let mut local: BTreeMap<K, u64> = BTreeMap::new();
            let lo = block * chunk;
            let hi = (lo + chunk).min(total);
            for mask in lo..hi {
                let key = stat(&path_from_mask(mask as u32, n));
                *local.entry(key).or_insert(0) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_insert(0) += c;
            }
            a
        });
    Ok(ExactPmf::from_counts(counts, total))
}

/// Exact expectation of an integer statistic over all `2^n` walks.
pub fn enumerate_expectation<F>(n: usize, stat: F) -> Result<BigRational, EnumError>
where
    F: Fn(&WalkPath) -> i64 + Sync,
{
    if n > MAX_ENUM_N {
        return Err(EnumError::TooLarge(n));
    }
    let total: u64 = 1 << n;
    let chunk: u64 = 1 << n.min(16);
    let sum: i128 = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|block| {
            let lo = block * chunk;
            let hi = (lo + chunk).min(total);
            let mut acc: i128 = 0;
            for mask in lo..hi {
                acc += stat(&path_from_mask(mask as u32, n)) as i128;
            }
            acc
        })
        .sum();
    Ok(BigRational::new(BigInt::from(sum), BigInt::from(total)))
}

/// Central binomial term `u_m = C(2m, m) 2^{-2m}`, exact.
pub fn central_term(m: usize) -> BigRational {
    let mut u = BigRational::one();
    for i in 1..=m {
        u *= BigRational::new(BigInt::from(2 * i - 1), BigInt::from(2 * i));
    }
    u
}

/// Limit of the `k`-th expected gap: `(1/2) u_{floor(k/2)}`.
pub fn expected_gap_limit(k: usize) -> BigRational {
    assert!(k >= 1);
    central_term(k / 2) / BigRational::from_integer(BigInt::from(2))
}

/// Exact `E S_k^+` from the binomial law of `S_k`, an independent route to
/// the same quantity the enumeration sums path by path.
pub fn expected_positive_part(k: usize) -> BigRational {
    // S_k = 2 B - k with B ~ Binomial(k, 1/2); sum j P(S_k = j) over j > 0.
    let mut num = BigInt::zero();
    let mut binom = BigInt::one(); // C(k, 0)
    for b in 0..=k {
        let j = 2 * b as i64 - k as i64;
        if j > 0 {
            num += BigInt::from(j) * &binom;
        }
        // C(k, b+1) = C(k, b) (k - b) / (b + 1)
        if b < k {
            binom = binom * BigInt::from(k - b) / BigInt::from(b + 1);
        }
    }
    BigRational::new(num, BigInt::from(2u64).pow(k as u32))
}

/// Exact pmf of the independent sum of a `k`-step maximum and an
/// `(n-k)`-step minimum; equals the pmf of the `k`-th order statistic of an
/// `n`-step walk.
pub fn wendel_convolution(k: usize, n: usize) -> Result<ExactPmf<i64>, EnumError> {
    assert!(k <= n);
    let max_pmf = if k == 0 {
        ExactPmf::degenerate(0i64)
    } else {
        enumerate_statistic(k, |p| {
            p.sums().iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b)) as i64
        })?
    };
    let min_pmf = if n == k {
        ExactPmf::degenerate(0i64)
    } else {
        enumerate_statistic(n - k, |p| {
            p.sums().iter().fold(f64::INFINITY, |a, b| a.min(*b)) as i64
        })?
    };
    Ok(max_pmf.convolve(&min_pmf))
}

/// Expected maximum of an `n`-step walk as the sum `sum_{k<=n} E S_k^+ / k`,
/// each term evaluated by the closed central-term form.
pub fn spitzer_expected_max(n: usize) -> BigRational {
    assert!(n >= 1);
    (1..=n).map(expected_gap_limit).sum()
}

/// Chebyshev polynomial of the third kind by the recurrence
/// `V_k = 2x V_{k-1} - V_{k-2}`, `V_0 = 1`, `V_1 = 2x - 1`.
pub fn chebyshev_v(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0 * x - 1.0,
        _ => {
            let mut prev = 1.0;
            let mut cur = 2.0 * x - 1.0;
            for _ in 2..=k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Exact-rational variant of [`chebyshev_v`].
pub fn chebyshev_v_exact(k: usize, x: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    match k {
        0 => BigRational::one(),
        1 => &two * x - BigRational::one(),
        _ => {
            let mut prev = BigRational::one();
            let mut cur = &two * x - BigRational::one();
            for _ in 2..=k {
                let next = &two * x * &cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Generating function `g_k(z) = 1 / V_k(1/z)` of the first-passage
/// occupation variables; `g_0 = 1`.
pub fn passage_gf(k: usize, z: f64) -> f64 {
    assert!(z > 0.0 && z <= 1.0, "z must be in (0, 1]");
    1.0 / chebyshev_v(k, 1.0 / z)
}

/// Generating function of the count of order statistics at or below level
/// `k`: `1 / (V_k(1/z) V_{k+1}(1/z))`.
pub fn eta_gf(k: usize, z: f64) -> f64 {
    assert!(k >= 1);
    assert!(z > 0.0 && z <= 1.0, "z must be in (0, 1]");
    let x = 1.0 / z;
    1.0 / (chebyshev_v(k, x) * chebyshev_v(k + 1, x))
}

/// Exact-rational variant of [`passage_gf`].
pub fn passage_gf_exact(k: usize, z: &BigRational) -> BigRational {
    BigRational::one() / chebyshev_v_exact(k, &(BigRational::one() / z))
}
