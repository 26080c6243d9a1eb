//! Distributional checks of the simple-walk samplers against exact laws
//! and walk-based oracles.

use std::collections::BTreeMap;

use rayon::prelude::*;

use orderwalk_core::rng::replica_rng;
use orderwalk_core::ssrw::branching::{sample_knight_chains, conditional_occupation};
use orderwalk_core::ssrw::chains::{
    combined_level_counts, nonneg_count_at_passage, upward_chain_step, walk_upcrossing_oracle,
};
use orderwalk_core::ssrw::exact::{enumerate_statistic, passage_gf};
use orderwalk_core::stats::dist::DiscreteDist;
use orderwalk_core::stats::hypothesis::chi_square_gof;
use orderwalk_core::walk::order_statistics;

#[test]
fn knight_down_chain_starts_geometric() {
    // P(Z_down_0 = k) = 2^{-k}, chi-square at 1e5 samples.
    let samples: Vec<u64> = (0..100_000u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0x6b1, r);
            sample_knight_chains(0, &mut rng).1[0]
        })
        .collect();
    let cells = 16usize;
    let mut observed = vec![0u64; cells];
    for s in &samples {
        observed[(*s as usize - 1).min(cells - 1)] += 1;
    }
    let mut probs: Vec<f64> = (1..=cells).map(|k| 0.5f64.powi(k as i32)).collect();
    probs[cells - 1] = 0.5f64.powi(cells as i32 - 1);
    let chi = chi_square_gof(&observed, &probs, 5.0);
    assert!(chi.p_value > 0.01, "p = {}", chi.p_value);
}

#[test]
fn knight_chains_match_walk_upcrossings() {
    // The first two upcrossing counts of each chain, against the counts
    // extracted from long simple-walk simulations.
    let samples = 100_000usize;
    let horizon = 40_000usize;
    let branching: Vec<((u64, u64), (u64, u64))> = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0x6b2, r);
            let (up, down) = sample_knight_chains(1, &mut rng);
            ((up[0], up[1].min(24)), (down[0].min(24), down[1].min(40)))
        })
        .collect();
    let oracle: Vec<((u64, u64), (u64, u64))> = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0x6b3, r);
            let (up, down) = walk_upcrossing_oracle(horizon, 1, &mut rng);
            ((up[0], up[1].min(24)), (down[0].min(24), down[1].min(40)))
        })
        .collect();

    // Upward chain: the 0 -> 1 upcrossing count is identically 1; the
    // 1 -> 2 count matches in law.
    assert!(branching.iter().all(|(u, _)| u.0 == 1));
    assert!(oracle.iter().all(|(u, _)| u.0 == 1));
    let b_up = DiscreteDist::from_samples(branching.iter().map(|(u, _)| u.1)).unwrap();
    let o_up = DiscreteDist::from_samples(oracle.iter().map(|(u, _)| u.1)).unwrap();
    let tv_up = b_up.tv(&o_up);
    assert!(tv_up < 0.01, "upward upcrossings tv = {tv_up}");

    let b_down = DiscreteDist::from_samples(branching.iter().map(|(_, d)| *d)).unwrap();
    let o_down = DiscreteDist::from_samples(oracle.iter().map(|(_, d)| *d)).unwrap();
    let tv_down = b_down.tv(&o_down);
    assert!(tv_down < 0.012, "downward upcrossings tv = {tv_down}");
}

#[test]
fn conditional_occupation_matches_rejection_oracle() {
    // (L_2 | L_0 = 2): closed-form thinned-geometric sum vs rejection
    // sampling on the exact chain-derived level counts.
    let target = 100_000usize;
    let direct: Vec<u64> = (0..target as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0x6b4, r);
            conditional_occupation(2, 2, &mut rng).min(60)
        })
        .collect();
    let accepted: Vec<u64> = (0..(8 * target) as u64)
        .into_par_iter()
        .filter_map(|r| {
            let mut rng = replica_rng(0x6b5, r);
            let counts = combined_level_counts(2, &mut rng);
            (counts[0] == 2).then_some(counts[2].min(60))
        })
        .collect();
    assert!(accepted.len() >= target, "rejection oracle too small: {}", accepted.len());
    let d = DiscreteDist::from_samples(direct).unwrap();
    let o = DiscreteDist::from_samples(accepted[..target].to_vec()).unwrap();
    let tv = d.tv(&o);
    assert!(tv < 0.02, "conditional occupation tv = {tv}");
}

#[test]
fn upward_kernel_matches_decomposition_marginal() {
    // Chain value after 50 kernel steps vs the decomposition-derived
    // upward-chain value at index 50.
    let samples = 100_000usize;
    let kernel: Vec<u64> = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0x6b6, r);
            let mut x = 1u64;
            for _ in 0..49 {
                x = upward_chain_step(x, &mut rng);
            }
            x
        })
        .collect();
    let walk: Vec<u64> = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0x6b7, r);
            let mut s: i64 = 0;
            let mut s_up: i64 = 0;
            let mut n_up = 0usize;
            loop {
                let step: bool = rand::Rng::random(&mut rng);
                let x = if step { 1i64 } else { -1 };
                s += x;
                if s > 0 {
                    s_up += x;
                    n_up += 1;
                    if n_up == 50 {
                        return s_up as u64;
                    }
                }
            }
        })
        .collect();
    let a = DiscreteDist::from_samples(kernel).unwrap();
    let b = DiscreteDist::from_samples(walk).unwrap();
    let tv = a.tv(&b);
    assert!(tv < 0.02, "upward marginal tv = {tv}");
}

#[test]
fn passage_gf_matches_walk_functional() {
    // g_2(1/2) = 1/11 against MC of the nonnegative-step count at the
    // first passage to level 2.
    let reps = 200_000usize;
    let vals: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0x6b8, r);
            match nonneg_count_at_passage(2, 10_000_000, &mut rng) {
                Some(n) => 0.5f64.powi(n as i32),
                None => 0.0, // capped: contributes ~z^inf = 0
            }
        })
        .collect();
    let mean: f64 = vals.iter().sum::<f64>() / reps as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / reps as f64;
    let se = (var / reps as f64).sqrt();
    let target = passage_gf(2, 0.5);
    assert!((target - 1.0 / 11.0).abs() < 1e-15);
    assert!((mean - target).abs() < 3.0 * se, "mean {mean} vs {target} (se {se})");
}

#[test]
fn gaps_are_indicators_and_reversible() {
    // For the simple walk every gap is 0 or 1, and the joint law of the
    // reversed gap vector equals that of the gap vector (n = 8, exact).
    let n = 8;
    let forward = enumerate_statistic(n, |p| {
        order_statistics(p).gaps.iter().map(|g| *g as i64).collect::<Vec<i64>>()
    })
    .unwrap();
    let reversed = enumerate_statistic(n, |p| {
        let mut g: Vec<i64> = order_statistics(p).gaps.iter().map(|g| *g as i64).collect();
        g.reverse();
        g
    })
    .unwrap();
    assert_eq!(forward, reversed);
    for key in forward.support() {
        assert!(key.iter().all(|g| *g == 0 || *g == 1), "gap outside {{0,1}}: {key:?}");
    }
}

#[test]
fn eta_counts_from_branching_match_chains() {
    // eta_1 from the double-immigration occupation counts vs the exact
    // chain occupation sampler.
    use orderwalk_core::ssrw::branching::{occupation_from_branching, sample_double_immigration};
    use orderwalk_core::ssrw::chains::eta_sample;
    let reps = 100_000usize;
    let from_branching: Vec<u64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0x6b9, r);
            let z = sample_double_immigration(1, &mut rng);
            occupation_from_branching(&z).unwrap().eta[1].min(80)
        })
        .collect();
    let from_chains: Vec<u64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0x6ba, r);
            eta_sample(1, &mut rng).min(80)
        })
        .collect();
    let a = DiscreteDist::from_samples(from_branching).unwrap();
    let b = DiscreteDist::from_samples(from_chains).unwrap();
    let tv = a.tv(&b);
    assert!(tv < 0.012, "eta_1 branching vs chains tv = {tv}");
}

#[test]
fn occupation_joint_law_from_branching_matches_chains() {
    // (L_0, L_1) from branching vs the exact chain-derived level counts.
    use orderwalk_core::ssrw::branching::{occupation_from_branching, sample_double_immigration};
    let reps = 100_000usize;
    let branching: Vec<(u64, u64)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0x6bb, r);
            let z = sample_double_immigration(1, &mut rng);
            let occ = occupation_from_branching(&z).unwrap();
            (occ.l[0].min(14), occ.l[1].min(28))
        })
        .collect();
    let chains: Vec<(u64, u64)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0x6bc, r);
            let counts = combined_level_counts(1, &mut rng);
            (counts[0].min(14), counts[1].min(28))
        })
        .collect();
    let a = DiscreteDist::from_samples(branching.clone()).unwrap();
    let b = DiscreteDist::from_samples(chains).unwrap();
    let tv = a.tv(&b);
    assert!(tv < 0.012, "joint occupation tv = {tv}");

    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    for (l0, _) in &branching {
        *hist.entry(*l0).or_insert(0) += 1;
    }
    // Mean of L_0 close to 2 as a cheap extra guard.
    let mean: f64 =
        hist.iter().map(|(k, c)| *k as f64 * *c as f64).sum::<f64>() / reps as f64;
    assert!((mean - 2.0).abs() < 0.05, "E L_0 = {mean}");
}
