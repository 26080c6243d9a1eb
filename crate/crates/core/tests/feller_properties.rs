//! Property tests and Monte Carlo checks of the Feller-chain machinery.

use proptest::prelude::*;
use rayon::prelude::*;

use orderwalk_core::feller::{
    decompose, ladder_variables, limit_order_stats, recover_reverse_induction,
    riffle_reconstruct, w1_tail,
};
use orderwalk_core::rng::replica_rng;
use orderwalk_core::ssrw::chains::{downward_reach_probability, upward_chain_step, upward_reach_probability};
use orderwalk_core::stats::samplers::{ascending_ladder_height, descending_ladder_depth};
use orderwalk_core::walk::{order_statistics, sample_path_with, IncrementSpec, WalkPath};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roundtrips_are_bitwise(xs in proptest::collection::vec(-3.0f64..3.0, 1..200)) {
        let path = WalkPath::from_increments(xs).unwrap();
        let pair = decompose(&path);
        prop_assert_eq!(recover_reverse_induction(&pair).unwrap(), path.clone());
        let riffled =
            riffle_reconstruct(&pair.ascending_segments(), &pair.descending_segments()).unwrap();
        prop_assert_eq!(riffled, path);
    }

    #[test]
    fn gap_sum_and_shift_invariants(xs in proptest::collection::vec(-5.0f64..5.0, 1..150)) {
        let path = WalkPath::from_increments(xs).unwrap();
        let os = order_statistics(&path);
        let gap_sum: f64 = os.gaps.iter().sum();
        prop_assert!((gap_sum - (os.max - os.min)).abs() < 1e-9);
        prop_assert!(os.shifted.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(os.shifted[0], 0.0);
        prop_assert!(os.gaps.iter().all(|g| *g >= 0.0));
    }

    #[test]
    fn order_statistics_permutation_invariant(
        xs in proptest::collection::vec(-4.0f64..4.0, 2..60),
        swap_a in 0usize..60,
        swap_b in 0usize..60,
    ) {
        // Sorting the sums multiset is invariant under reindexing the values.
        let path = WalkPath::from_increments(xs).unwrap();
        let os = order_statistics(&path);
        let mut sums = path.sums().to_vec();
        let (a, b) = (swap_a % sums.len(), swap_b % sums.len());
        sums.swap(a, b);
        let mut resorted = sums;
        resorted.sort_unstable_by(f64::total_cmp);
        prop_assert_eq!(resorted, os.values);
    }

    #[test]
    fn ladder_monotonicity(xs in proptest::collection::vec(-2.5f64..2.5, 1..120)) {
        let path = WalkPath::from_increments(xs).unwrap();
        let lad = ladder_variables(&path);
        prop_assert!(lad.strict_ascending.windows(2).all(|w| w[0].1 < w[1].1 && w[0].0 < w[1].0));
        prop_assert!(lad.weak_descending.windows(2).all(|w| w[0].1 >= w[1].1 && w[0].0 < w[1].0));
    }

    #[test]
    fn segment_finals_are_ordered(xs in proptest::collection::vec(-2.0f64..2.0, 2..150)) {
        let pair = decompose(&WalkPath::from_increments(xs).unwrap());
        let asc = pair.ascending_segments();
        prop_assert!(asc.windows(2).all(|w| w[0].final_value() < w[1].final_value()));
        let desc = pair.descending_segments();
        // Strictly decreasing after the first final, which may tie with 0.
        prop_assert!(desc.windows(2).all(|w| w[0].final_value() >= w[1].final_value()));
        prop_assert!(desc.iter().skip(1).zip(desc.iter().skip(2)).all(|(a, b)| a.final_value() > b.final_value()));
    }
}

#[test]
fn chain_one_step_marginals_are_independent() {
    // The first value of each chain, jointly, factorizes (SSRW): the upward
    // chain starts at 1 deterministically, and its tie to the downward start
    // would show up as a joint/product mismatch.
    let reps = 100_000usize;
    let pairs: Vec<(i64, i64)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0xf1, r);
            let path = sample_path_with(&IncrementSpec::SimpleSymmetric, 400, &mut rng);
            let pair = decompose(&path);
            let up1 = if pair.n_plus() >= 1 { pair.up[1] as i64 } else { i64::MAX };
            let down2 = if pair.n_minus() >= 2 { -pair.down[2] as i64 } else { i64::MAX };
            (up1, down2)
        })
        .collect();
    use std::collections::BTreeMap;
    let mut joint: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    let mut ma: BTreeMap<i64, u64> = BTreeMap::new();
    let mut mb: BTreeMap<i64, u64> = BTreeMap::new();
    for (a, b) in &pairs {
        *joint.entry((*a, *b)).or_insert(0) += 1;
        *ma.entry(*a).or_insert(0) += 1;
        *mb.entry(*b).or_insert(0) += 1;
    }
    let n = reps as f64;
    let mut tv = 0.0;
    for ((a, b), c) in &joint {
        let p = *c as f64 / n;
        let q = (ma[a] as f64 / n) * (mb[b] as f64 / n);
        tv += (p - q).abs();
    }
    tv /= 2.0;
    // MC resolution of the joint-vs-product comparison at this size.
    let bound = 3.0 * (joint.len() as f64 / n).sqrt();
    assert!(tv < bound, "tv {tv} vs bound {bound}");
}

#[test]
fn transience_proxy_matches_reach_probabilities() {
    // Once the upward chain first exceeds L, it later dips below
    // floor(L (1-delta)) with probability floor(L(1-delta))/L exactly; the
    // observed fractions must match at 3 binomial SE. (The fraction is flat
    // in L up to lattice rounding, not decreasing.)
    let delta = 0.4;
    for level in [10u64, 20, 40] {
        let reps = 10_000usize;
        let target = ((level as f64) * (1.0 - delta)).floor() as u64;
        let dips: u64 = (0..reps as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = replica_rng(0xf2 ^ level, r);
                let mut x = 1u64;
                while x < level {
                    x = upward_chain_step(x, &mut rng);
                }
                // Exact dip event by the reach probability.
                (rng_chance(upward_reach_probability(x, target), &mut rng)) as u64
            })
            .sum();
        let p = dips as f64 / reps as f64;
        let expect = target as f64 / level as f64;
        let se = (expect * (1.0 - expect) / reps as f64).sqrt();
        assert!((p - expect).abs() < 3.5 * se, "L={level}: p {p} vs {expect}");
    }
}

fn rng_chance<R: rand::Rng>(p: f64, rng: &mut R) -> bool {
    rng.random::<f64>() < p
}

#[test]
fn w1_histogram_matches_ladder_tail_product() {
    // Gaussian walk: the limiting lowest gap against the product of the two
    // first-ladder-height tails, bin by bin.
    let spec = IncrementSpec::gaussian(1.0);
    let reps = 100_000usize;
    let cap = 1_000_000usize;
    let w1: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0xf3, r);
            let up = ascending_ladder_height(&spec, cap, &mut rng).unwrap_or(f64::INFINITY);
            let down = descending_ladder_depth(&spec, cap, &mut rng).unwrap_or(f64::INFINITY);
            up.min(down)
        })
        .collect();
    let up_tails: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0xf4, r);
            ascending_ladder_height(&spec, cap, &mut rng).unwrap_or(f64::INFINITY)
        })
        .collect();
    let down_tails: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0xf5, r);
            descending_ladder_depth(&spec, cap, &mut rng).unwrap_or(f64::INFINITY)
        })
        .collect();
    for w in [0.3f64, 0.8, 1.5] {
        let p_w1 = w1.iter().filter(|v| **v > w).count() as f64 / reps as f64;
        let t_up = up_tails.iter().filter(|v| **v > w).count() as f64 / reps as f64;
        let t_down = down_tails.iter().filter(|v| **v > w).count() as f64 / reps as f64;
        let prod = w1_tail(|_| t_up, |_| t_down, w);
        let se = (p_w1 * (1.0 - p_w1) / reps as f64).sqrt()
            + (t_down * (1.0 - t_up) / reps as f64).sqrt()
            + (t_up * (1.0 - t_down) / reps as f64).sqrt();
        assert!((p_w1 - prod).abs() < 3.0 * se, "w={w}: {p_w1} vs {prod}");
    }
}

#[test]
fn limit_order_stats_certifies_and_reports() {
    let spec = IncrementSpec::gaussian(1.0);
    let out = limit_order_stats(&spec, 2, 4_000_000, 4.0, 99).unwrap();
    assert!(out.certified, "expected certification, guard {}", out.guard);
    assert!(out.w.len() == 2 && out.w[0] <= out.w[1] && out.w[0] >= 0.0);
    assert!(out.guard > out.w[1]);

    // A tiny horizon cannot certify.
    let out = limit_order_stats(&spec, 2, 64, 4.0, 99).unwrap();
    assert!(!out.certified);
}

#[test]
fn ssrw_w1_probability_half() {
    // P(W_1 = 1) = 1/2 for the simple walk, from the limit sampler.
    let reps = 4_000usize;
    let ones: u64 = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0xf6, r);
            let out = orderwalk_core::feller::limit_order_stats_with(
                &IncrementSpec::SimpleSymmetric,
                1,
                2_000_000,
                6.0,
                &mut rng,
            );
            (out.w[0] == 1.0) as u64
        })
        .sum();
    let p = ones as f64 / reps as f64;
    let se = (0.25f64 / reps as f64).sqrt();
    assert!((p - 0.5).abs() < 3.5 * se, "P(W_1 = 1) = {p}");
}

#[test]
fn mixed_walk_roundtrip_with_flat_segments() {
    // A lattice walk with many exact ties exercises the tie rule of the
    // riffle ordering.
    let reps = 2_000;
    for r in 0..reps {
        let mut rng = replica_rng(0xf7, r);
        let path = sample_path_with(&IncrementSpec::SimpleSymmetric, 64, &mut rng);
        let pair = decompose(&path);
        let riffled =
            riffle_reconstruct(&pair.ascending_segments(), &pair.descending_segments()).unwrap();
        assert_eq!(riffled, path);
        assert_eq!(recover_reverse_induction(&pair).unwrap(), path);
    }
    // Downward reach probability sanity used by the samplers.
    assert!((downward_reach_probability(5, 2) - 0.5).abs() < 1e-15);
}
