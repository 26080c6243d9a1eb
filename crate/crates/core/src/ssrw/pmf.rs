//! Exact probability mass functions over discrete supports.
//!
//! All masses are arbitrary-precision rationals and must sum to exactly 1;
//! this is the common currency of the enumeration oracles, so that identity
//! checks between independently computed distributions are exact rather than
//! approximate.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact pmf with ordered keys; masses are positive rationals summing to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPmf<K: Ord> {
    masses: BTreeMap<K, BigRational>,
}

impl<K: Ord + Clone> ExactPmf<K> {
    /// Build from occurrence counts out of `total` equiprobable outcomes.
    pub fn from_counts(counts: BTreeMap<K, u64>, total: u64) -> Self {
        assert!(total > 0);
        assert_eq!(counts.values().sum::<u64>(), total, "counts must sum to total");
        let denom = BigInt::from(total);
        let masses = counts
            .into_iter()
            .filter(|(_, c)| *c > 0)
            .map(|(k, c)| (k, BigRational::new(BigInt::from(c), denom.clone())))
            .collect();
        ExactPmf { masses }
    }

    /// Build from explicit rational masses; they must be positive and sum
    /// to exactly 1.
    pub fn from_masses(masses: BTreeMap<K, BigRational>) -> Self {
        let total: BigRational = masses.values().cloned().sum();
        assert!(total.is_one(), "masses must sum to 1, got {total}");
        assert!(masses.values().all(|m| m.is_positive()), "masses must be positive");
        ExactPmf { masses }
    }

    /// Point mass at `k`.
    pub fn degenerate(k: K) -> Self {
        let mut masses = BTreeMap::new();
        masses.insert(k, BigRational::one());
        ExactPmf { masses }
    }

    pub fn mass(&self, k: &K) -> BigRational {
        self.masses.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.masses.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &BigRational)> {
        self.masses.iter()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Exact total variation distance, `(1/2) sum |p - q|`.
    pub fn tv_exact(&self, other: &Self) -> BigRational {
        let mut acc = BigRational::zero();
        let mut keys: Vec<&K> = self.masses.keys().collect();
        for k in other.masses.keys() {
            if !self.masses.contains_key(k) {
                keys.push(k);
            }
        }
        for k in keys {
            acc += (self.mass(k) - other.mass(k)).abs();
        }
        acc / BigRational::from_integer(BigInt::from(2))
    }

    /// Push the support through `f`, merging masses that collide.
    pub fn map_support<L: Ord + Clone>(&self, f: impl Fn(&K) -> L) -> ExactPmf<L> {
        let mut masses: BTreeMap<L, BigRational> = BTreeMap::new();
        for (k, m) in &self.masses {
            *masses.entry(f(k)).or_insert_with(BigRational::zero) += m.clone();
        }
        ExactPmf { masses }
    }
}

impl ExactPmf<i64> {
    /// Exact expectation of the identity statistic.
    pub fn expectation(&self) -> BigRational {
        self.masses
            .iter()
            .map(|(k, m)| BigRational::from_integer(BigInt::from(*k)) * m)
            .sum()
    }

    /// Distribution of the sum of independent draws from `self` and `other`.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut masses: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (a, pa) in &self.masses {
            for (b, pb) in &other.masses {
                *masses.entry(a + b).or_insert_with(BigRational::zero) += pa * pb;
            }
        }
        ExactPmf { masses }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn counts_and_masses_agree() {
        let mut counts = BTreeMap::new();
        counts.insert(0i64, 1);
        counts.insert(1i64, 3);
        let p = ExactPmf::from_counts(counts, 4);
        assert_eq!(p.mass(&1), ratio(3, 4));
        assert_eq!(p.mass(&7), BigRational::zero());
    }

    #[test]
    fn tv_and_convolution() {
        let mut a = BTreeMap::new();
        a.insert(0i64, ratio(1, 2));
        a.insert(1i64, ratio(1, 2));
        let p = ExactPmf::from_masses(a);
        let mut b = BTreeMap::new();
        b.insert(0i64, ratio(1, 4));
        b.insert(1i64, ratio(3, 4));
        let q = ExactPmf::from_masses(b);
        assert_eq!(p.tv_exact(&q), ratio(1, 4));
        assert_eq!(p.tv_exact(&p), BigRational::zero());

        let conv = p.convolve(&q);
        assert_eq!(conv.mass(&0), ratio(1, 8));
        assert_eq!(conv.mass(&1), ratio(1, 2));
        assert_eq!(conv.mass(&2), ratio(3, 8));
        assert_eq!(conv.expectation(), ratio(5, 4));
    }

    #[test]
    fn disjoint_supports_have_tv_one() {
        let p = ExactPmf::degenerate(0i64);
        let q = ExactPmf::degenerate(5i64);
        assert_eq!(p.tv_exact(&q), BigRational::one());
    }
}
