//! Empirical distributions and total variation distance.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::ssrw::pmf::ExactPmf;

#[derive(Debug, Error, PartialEq)]
pub enum DistError {
    #[error("incompatible binnings: origin/width ({0}, {1}) vs ({2}, {3})")]
    IncompatibleBinning(f64, f64, f64, f64),
    #[error("empty sample")]
    Empty,
}

/// Empirical distribution over an integer-like ordered support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteDist<K: Ord> {
    counts: BTreeMap<K, u64>,
    n: u64,
}

impl<K: Ord + Clone> DiscreteDist<K> {
    pub fn from_samples<I: IntoIterator<Item = K>>(samples: I) -> Result<Self, DistError> {
        let mut counts = BTreeMap::new();
        let mut n = 0u64;
        for s in samples {
            *counts.entry(s).or_insert(0) += 1;
            n += 1;
        }
        if n == 0 {
            return Err(DistError::Empty);
        }
        Ok(DiscreteDist { counts, n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &BTreeMap<K, u64> {
        &self.counts
    }

    pub fn prob(&self, k: &K) -> f64 {
        *self.counts.get(k).unwrap_or(&0) as f64 / self.n as f64
    }

    /// Total variation distance between two empirical laws on the same
    /// (discrete) support lattice.
    pub fn tv(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for (k, c) in &self.counts {
            acc += (*c as f64 / self.n as f64 - other.prob(k)).abs();
        }
        for (k, c) in &other.counts {
            if !self.counts.contains_key(k) {
                acc += *c as f64 / other.n as f64;
            }
        }
        acc / 2.0
    }

    /// Total variation distance against an exact pmf.
    pub fn tv_vs_exact(&self, pmf: &ExactPmf<K>) -> f64 {
        let mut acc = 0.0;
        for (k, c) in &self.counts {
            let p = pmf.mass(k).to_f64().unwrap_or(0.0);
            acc += (*c as f64 / self.n as f64 - p).abs();
        }
        for (k, m) in pmf.iter() {
            if !self.counts.contains_key(k) {
                acc += m.to_f64().unwrap_or(0.0);
            }
        }
        acc / 2.0
    }
}

/// Continuous samples binned on a declared lattice `origin + width * i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedDist {
    origin: f64,
    width: f64,
    counts: BTreeMap<i64, u64>,
    n: u64,
}

impl BinnedDist {
    pub fn from_samples<I: IntoIterator<Item = f64>>(
        origin: f64,
        width: f64,
        samples: I,
    ) -> Result<Self, DistError> {
        assert!(width > 0.0);
        let mut counts = BTreeMap::new();
        let mut n = 0u64;
        for s in samples {
            let bin = ((s - origin) / width).floor() as i64;
            *counts.entry(bin).or_insert(0) += 1;
            n += 1;
        }
        if n == 0 {
            return Err(DistError::Empty);
        }
        Ok(BinnedDist { origin, width, counts, n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Binned total variation distance. The binnings must agree; the binned
    /// value lower-bounds the true TV between the underlying laws.
    pub fn tv(&self, other: &Self) -> Result<f64, DistError> {
        if (self.origin - other.origin).abs() > 1e-12 || (self.width - other.width).abs() > 1e-12 {
            return Err(DistError::IncompatibleBinning(
                self.origin,
                self.width,
                other.origin,
                other.width,
            ));
        }
        let mut acc = 0.0;
        for (k, c) in &self.counts {
            let q = *other.counts.get(k).unwrap_or(&0) as f64 / other.n as f64;
            acc += (*c as f64 / self.n as f64 - q).abs();
        }
        for (k, c) in &other.counts {
            if !self.counts.contains_key(k) {
                acc += *c as f64 / other.n as f64;
            }
        }
        Ok(acc / 2.0)
    }
}
