//! Named verification experiments.
//!
//! Each experiment pins its sizes, seeds and tolerances up front, runs the
//! relevant oracles and estimators, and returns an [`ExperimentReport`] with
//! one pass/fail line per check. The `all` set is the acceptance suite.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::feller::{decompose, recover_reverse_induction, riffle_reconstruct};
use crate::rng::replica_rng;
use crate::ssrw::branching::{exact_l0_l1_pmf, occupation_from_branching, sample_double_immigration};
use crate::ssrw::chains::{
    eta_sample, nonneg_count_at_passage, reflected_passage_time, upward_occupation,
    walk_occupation_oracle,
};
use crate::ssrw::exact::{
    central_term, enumerate_expectation, enumerate_statistic, eta_gf, expected_positive_part,
    wendel_convolution,
};
use crate::stats::dist::DiscreteDist;
use crate::stats::hypothesis::{chi_square_gof, chi_square_two_sample};
use crate::stats::mixture::mixture_gap_checks;
use crate::stats::rate::rate_fit;
use crate::stats::report::{CheckResult, ExperimentReport};
use crate::stats::samplers::LowestTracker;
use crate::stats::hypothesis::ks_two_sample;
use crate::valley::evaluator::{h_a, h_a_quadrature, ValleyEvaluator};
use crate::valley::mc::{discretization_experiment, mc_valley_order_stats};
use crate::valley::{exact_valley_mean, valley_mean_exact};
use crate::walk::{order_statistics, sample_path_with, IncrementSpec, WalkPath};

/// Names of the acceptance-suite experiments, in criterion order.
pub const ACCEPTANCE: [&str; 11] = [
    "wendel",
    "gaps",
    "roundtrip",
    "fbid",
    "occupation",
    "etagf",
    "w1",
    "valley",
    "asymptotics",
    "rate",
    "mixture",
];

/// All runnable experiment names (the acceptance set plus extras).
pub fn experiment_names() -> Vec<&'static str> {
    let mut names = ACCEPTANCE.to_vec();
    names.push("discretization");
    names
}

/// Run one experiment by name with its pinned default sizes.
pub fn run_named(name: &str, seed: u64) -> Option<ExperimentReport> {
    let report = match name {
        "wendel" => wendel_experiment(12),
        "gaps" => gaps_experiment(12),
        "roundtrip" => roundtrip_experiment(10_000, 200, seed),
        "fbid" => fbid_experiment(10),
        "occupation" => occupation_experiment(100_000, 400_000, seed),
        "etagf" => etagf_experiment(1_000_000, 100_000, seed),
        "w1" => w1_experiment(10_000, 100_000, seed),
        "valley" => valley_experiment(1_000_000, seed),
        "asymptotics" => asymptotics_experiment(400, 10_000, 100_000, seed),
        "rate" => rate_experiment(300_000, seed),
        "mixture" => mixture_experiment(100_000, seed),
        "discretization" => discretization_named(10_000, 1_000, 8_000, seed),
        _ => return None,
    };
    Some(report)
}

fn finish(mut report: ExperimentReport, start: Instant) -> ExperimentReport {
    report.wall_ms = start.elapsed().as_millis();
    report
}

/// Criterion 1: the max-plus-min convolution equals the order-statistic law,
/// exactly, for every `0 <= k <= n <= n_max`.
pub fn wendel_experiment(n_max: usize) -> ExperimentReport {
    let start = Instant::now();
    let mut report = ExperimentReport::new("wendel", json!({"n_max": n_max}), 0);
    let mut mismatches = 0u64;
    for n in 1..=n_max {
        for k in 0..=n {
            let conv = wendel_convolution(k, n).expect("n under enumeration cap");
            let direct = enumerate_statistic(n, |p| order_statistics(p).values[k] as i64)
                .expect("n under enumeration cap");
            if conv != direct {
                mismatches += 1;
            }
        }
    }
    report.push(CheckResult::exact(
        "convolution-vs-enumeration",
        mismatches,
        "exact rational pmf equality over all (k, n) pairs",
    ));
    finish(report, start)
}

/// Criterion 2: exact gap-expectation identities for the simple walk.
pub fn gaps_experiment(n_max: usize) -> ExperimentReport {
    let start = Instant::now();
    let mut report = ExperimentReport::new("gaps", json!({"n_max": n_max}), 0);

    // E S_j^+ and E S_j^- by enumeration, j <= n_max.
    let pos: Vec<BigRational> = (0..=n_max)
        .map(|j| {
            if j == 0 {
                BigRational::from_integer(0.into())
            } else {
                enumerate_expectation(j, |p| (p.sums()[j] as i64).max(0)).expect("small n")
            }
        })
        .collect();
    let neg: Vec<BigRational> = (0..=n_max)
        .map(|j| {
            if j == 0 {
                BigRational::from_integer(0.into())
            } else {
                enumerate_expectation(j, |p| (-(p.sums()[j] as i64)).max(0)).expect("small n")
            }
        })
        .collect();

    let mut identity_mismatches = 0u64;
    let mut palindrome_mismatches = 0u64;
    for n in 1..=n_max {
        let gap_means: Vec<BigRational> = (1..=n)
            .map(|k| {
                enumerate_expectation(n, move |p| order_statistics(p).gaps[k - 1] as i64)
                    .expect("small n")
            })
            .collect();
        for k in 1..=n {
            let lhs = &gap_means[k - 1];
            let rhs = &pos[k] / BigRational::from_integer((k as i64).into())
                + &neg[n - k + 1] / BigRational::from_integer(((n - k + 1) as i64).into());
            if *lhs != rhs {
                identity_mismatches += 1;
            }
            if *lhs != gap_means[n - k] {
                palindrome_mismatches += 1;
            }
        }
    }
    report.push(CheckResult::exact(
        "gap-identity",
        identity_mismatches,
        "E D_{k,n} = E S_k^+/k + E S_{n-k+1}^-/(n-k+1), enumeration both sides",
    ));
    report.push(CheckResult::exact(
        "gap-palindrome",
        palindrome_mismatches,
        "E D_{n-k+1,n} = E D_{k,n}, enumeration",
    ));

    // E S_k^+ / k = u_{floor(k/2)} / 2: enumeration route for k <= n_max,
    // binomial route up to 24.
    let mut demoivre_mismatches = 0u64;
    for k in 1..=n_max {
        let lhs = &pos[k] / BigRational::from_integer((k as i64).into());
        let rhs = central_term(k / 2) / BigRational::from_integer(2.into());
        if lhs != rhs {
            demoivre_mismatches += 1;
        }
    }
    report.push(CheckResult::exact(
        "central-term-enumeration",
        demoivre_mismatches,
        "E S_k^+/k = u_{floor(k/2)}/2 by path enumeration",
    ));
    let mut binom_mismatches = 0u64;
    for k in 1..=24 {
        let lhs = expected_positive_part(k) / BigRational::from_integer((k as i64).into());
        let rhs = central_term(k / 2) / BigRational::from_integer(2.into());
        if lhs != rhs {
            binom_mismatches += 1;
        }
    }
    report.push(CheckResult::exact(
        "central-term-binomial",
        binom_mismatches,
        "same identity through the exact binomial law of S_k, k <= 24",
    ));
    finish(report, start)
}

/// Criterion 3: both recovery algorithms reproduce the walk bit for bit.
pub fn roundtrip_experiment(gaussian_paths: usize, n: usize, seed: u64) -> ExperimentReport {
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "roundtrip",
        json!({"ssrw_n_max": 12, "gaussian_paths": gaussian_paths, "gaussian_n": n}),
        seed,
    );

    let mut ssrw_failures = 0u64;
    for len in 1..=12usize {
        for mask in 0u32..(1u32 << len) {
            let xs: Vec<f64> =
                (0..len).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
            let p = WalkPath::from_increments(xs).expect("finite");
            let pair = decompose(&p);
            if recover_reverse_induction(&pair).ok().as_ref() != Some(&p) {
                ssrw_failures += 1;
            }
            let riffled =
                riffle_reconstruct(&pair.ascending_segments(), &pair.descending_segments());
            if riffled.ok().as_ref() != Some(&p) {
                ssrw_failures += 1;
            }
        }
    }
    report.push(CheckResult::exact(
        "ssrw-exhaustive",
        ssrw_failures,
        "reverse induction and riffle over all sign paths, n <= 12",
    ));

    let gaussian_failures: u64 = (0..gaussian_paths as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let p = sample_path_with(&IncrementSpec::gaussian(1.0), n, &mut rng);
            let pair = decompose(&p);
            let mut bad = 0u64;
            if recover_reverse_induction(&pair).ok().as_ref() != Some(&p) {
                bad += 1;
            }
            let riffled =
                riffle_reconstruct(&pair.ascending_segments(), &pair.descending_segments());
            if riffled.ok().as_ref() != Some(&p) {
                bad += 1;
            }
            bad
        })
        .sum();
    report.push(CheckResult::exact(
        "gaussian-bitwise",
        gaussian_failures,
        "both recoveries reproduce sampled Gaussian paths exactly",
    ));
    finish(report, start)
}

/// Criterion 4: at every finite n, the two path fragments around the last
/// argmin have, jointly, exactly the law of the (upward, negated downward)
/// chain pair.
pub fn fbid_experiment(n_max: usize) -> ExperimentReport {
    let start = Instant::now();
    let mut report = ExperimentReport::new("fbid", json!({"n_max": n_max}), 0);
    let mut mismatches = 0u64;
    for n in 1..=n_max {
        let split = enumerate_statistic(n, |p| {
            let (post, pre) = crate::feller::split_at_argmin(p);
            (
                post.iter().map(|v| *v as i64).collect::<Vec<i64>>(),
                pre.iter().map(|v| *v as i64).collect::<Vec<i64>>(),
            )
        })
        .expect("small n");
        let chains = enumerate_statistic(n, |p| {
            let pair = decompose(p);
            (
                pair.up.iter().map(|v| *v as i64).collect::<Vec<i64>>(),
                pair.down.iter().map(|v| -*v as i64).collect::<Vec<i64>>(),
            )
        })
        .expect("small n");
        if split != chains {
            mismatches += 1;
        }
    }
    report.push(CheckResult::exact(
        "argmin-split-vs-chains",
        mismatches,
        "joint pmf equality of the split pair and the chain pair, per n",
    ));
    finish(report, start)
}

/// Criterion 5: the lowest occupation count is geometric, and the branching
/// representation of `(L_0, L_1)` matches the walk decomposition.
pub fn occupation_experiment(samples: usize, horizon: usize, seed: u64) -> ExperimentReport {
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "occupation",
        json!({"samples": samples, "oracle_horizon": horizon}),
        seed,
    );

    // Chi-square of sampled branching L_0 against P(L_0 = k) = 2^{-k}.
    let branching_l0: Vec<u64> = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let z = sample_double_immigration(0, &mut rng);
            occupation_from_branching(&z).expect("valid sample").l[0]
        })
        .collect();
    let max_cell = 18usize;
    let mut observed = vec![0u64; max_cell + 1];
    for l0 in &branching_l0 {
        let idx = (*l0 as usize).min(max_cell);
        observed[idx] += 1;
    }
    let mut probs = vec![0.0f64; max_cell + 1];
    for (k, p) in probs.iter_mut().enumerate().skip(1) {
        *p = 0.5f64.powi(k as i32);
    }
    probs[max_cell] = 0.5f64.powi(max_cell as i32 - 1); // tail mass 2^{-(m-1)}
    let chi = chi_square_gof(&observed[1..], &probs[1..], 5.0);
    report.push(CheckResult::p_value(
        "lowest-count-geometric",
        chi.p_value,
        0.01,
        "chi-square of branching L_0 against the geometric law",
    ));

    // Decomposition oracle for (L_0, L_1) from long simple-walk simulations,
    // against the exact branching law (coordinates saturated at (12, 24)).
    let (cap0, cap1) = (12u64, 24u64);
    let oracle: Vec<(u64, u64)> = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed ^ 0xdeca_f000, r);
            let counts = walk_occupation_oracle(horizon, 1, &mut rng);
            (counts[0].min(cap0), counts[1].min(cap1))
        })
        .collect();
    let exact_law = exact_l0_l1_pmf(cap0, cap1);
    let d_oracle = DiscreteDist::from_samples(oracle).expect("nonempty");
    report.push(CheckResult::upper_bound(
        "branching-vs-decomposition-tv",
        d_oracle.tv_vs_exact(&exact_law),
        0.015,
        "joint (L_0, L_1): finite-horizon walk decomposition vs the exact branching law",
    ));
    finish(report, start)
}

/// Criterion 6: the eta generating function, and the equidistribution of the
/// three first-passage occupation variables.
pub fn etagf_experiment(gf_reps: usize, pair_reps: usize, seed: u64) -> ExperimentReport {
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "etagf",
        json!({"gf_reps": gf_reps, "pair_reps": pair_reps, "z": [0.5, 0.7], "k": [1, 2, 3]}),
        seed,
    );

    for k in 1..=3u64 {
        // One sample set per k, reused across z values.
        let etas: Vec<u64> = (0..gf_reps as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = replica_rng(seed ^ (k * 0x517c_c1b7), r);
                eta_sample(k, &mut rng)
            })
            .collect();
        for z in [0.5f64, 0.7] {
            let vals: Vec<f64> = etas.iter().map(|e| z.powi(*e as i32)).collect();
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let se = (var / n).sqrt();
            report.push(CheckResult::std_errors(
                &format!("eta-gf-k{k}-z{z}"),
                mean,
                eta_gf(k as usize, z),
                se,
                3.0,
                "MC E z^eta_k vs 1/(V_k(1/z) V_{k+1}(1/z))",
            ));
        }
    }

    // Pairwise equidistribution of the three Lemma-style variables.
    let cap = 10_000_000usize;
    for k in 1..=3i64 {
        let (mut a, mut b, mut c) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
        let samples: Vec<(Option<u64>, u64, u64)> = (0..pair_reps as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = replica_rng(seed ^ (0xabc0 + k as u64), r);
                let n0 = nonneg_count_at_passage(k, cap, &mut rng);
                let tref = reflected_passage_time(k, &mut rng);
                let eta_up = upward_occupation(k as u64, &mut rng);
                (n0, tref, eta_up)
            })
            .collect();
        let mut dropped = 0u64;
        for (n0, tref, eta_up) in samples {
            match n0 {
                Some(v) => *a.entry(v).or_insert(0u64) += 1,
                None => dropped += 1,
            }
            *b.entry(tref).or_insert(0u64) += 1;
            *c.entry(eta_up).or_insert(0u64) += 1;
        }
        for (name, x, y) in [("n0-vs-reflected", &a, &b), ("n0-vs-chain", &a, &c), ("reflected-vs-chain", &b, &c)]
        {
            let chi = chi_square_two_sample(x, y, 5.0);
            report.push(CheckResult::p_value(
                &format!("{name}-k{k}"),
                chi.p_value,
                0.01,
                &format!("two-sample chi-square; {dropped} capped passages dropped"),
            ));
        }
    }
    finish(report, start)
}

/// Criterion 7: the lowest gap of a long simple walk is 1 with probability
/// 1/2 in the limit.
pub fn w1_experiment(n: usize, reps: usize, seed: u64) -> ExperimentReport {
    let start = Instant::now();
    let mut report = ExperimentReport::new("w1", json!({"n": n, "reps": reps}), seed);
    let unique: u64 = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let mut s: i64 = 0;
            let mut min: i64 = 0;
            let mut at_min: u32 = 1;
            let mut steps = 0usize;
            'outer: loop {
                let mut word: u64 = rng.random();
                for _ in 0..64 {
                    s += ((word & 1) as i64) * 2 - 1;
                    word >>= 1;
                    if s < min {
                        min = s;
                        at_min = 1;
                    } else if s == min {
                        at_min += 1;
                    }
                    steps += 1;
                    if steps >= n {
                        break 'outer;
                    }
                }
            }
            (at_min == 1) as u64
        })
        .sum();
    let p = unique as f64 / reps as f64;
    let se = (p * (1.0 - p) / reps as f64).sqrt();
    report.push(CheckResult::std_errors(
        "lowest-gap-probability",
        p,
        0.5,
        se,
        3.0,
        "P(D_{1,n} = 1) vs the product of the two ladder tails at 1/2",
    ));
    finish(report, start)
}

/// Criterion 8: closed-form H against 2-D quadrature on a grid; the mean of
/// the valley minimum against the zeta value; Monte Carlo against both.
pub fn valley_experiment(mc_reps: usize, seed: u64) -> ExperimentReport {
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "valley",
        json!({"mc_reps": mc_reps, "grid": "a in [0.05,5] x t in [0.05,50], log-spaced"}),
        seed,
    );

    // (a) closed form vs 2-D quadrature of the defining double integral.
    let a_grid = log_grid(0.05, 5.0, 8);
    let t_grid = log_grid(0.05, 50.0, 8);
    let points: Vec<(f64, f64)> =
        a_grid.iter().flat_map(|a| t_grid.iter().map(move |t| (*a, *t))).collect();
    let diffs: Vec<f64> = points
        .par_iter()
        .map(|(a, t)| match h_a_quadrature(*a, *t, 1e-10) {
            Ok(q) => (h_a(*a, *t) - q).abs(),
            Err(_) => f64::INFINITY,
        })
        .collect();
    let max_diff = diffs.iter().copied().fold(0.0f64, f64::max);
    report.push(CheckResult::upper_bound(
        "h-closed-vs-quadrature",
        max_diff,
        1e-8,
        "max |closed H - 2D quadrature| over the 8x8 log grid",
    ));

    // (b) mean of the valley minimum vs the zeta value, through the
    // pairwise-conditional product form of the grid survival.
    let ev = ValleyEvaluator::new(2e-5, 200_000, 2e-6);
    let target = exact_valley_mean();
    match ev.valley_mean() {
        Ok(m) => {
            report.push(CheckResult::absolute(
                "mean-vs-zeta-product",
                m.value,
                target,
                1e-3,
                "tail-integral mean through the pairwise-conditional product; the product \
                 multiplies P(R(k+u)>a | R(k-1+u)>a) as if survival events screened off the \
                 past, which understates every factor (verified against 2- and 3-step \
                 quadrature and the exact kernel iteration below), so this form misses the \
                 zeta value structurally",
            ));
        }
        Err(e) => {
            report.push(CheckResult::absolute(
                "mean-vs-zeta-product",
                f64::NAN,
                target,
                1e-3,
                &format!("valley_mean failed: {e}"),
            ));
        }
    }

    // (b') the same mean with the exact kernel-iterated survival.
    match valley_mean_exact() {
        Ok(v) => {
            report.push(CheckResult::absolute(
                "mean-vs-zeta-exact",
                v,
                target,
                1e-3,
                "tail-integral mean with the exact grid-survival law (transition-kernel \
                 iteration); this is the numerical verification of the zeta identity",
            ));
        }
        Err(e) => {
            report.push(CheckResult::absolute(
                "mean-vs-zeta-exact",
                f64::NAN,
                target,
                1e-3,
                &format!("valley_mean_exact failed: {e}"),
            ));
        }
    }

    // (c) Monte Carlo mean, bias-corrected, against the zeta value.
    let mc = mc_valley_order_stats(0, 400_000, mc_reps, seed, 3e-3);
    report.push(CheckResult::std_errors(
        "mc-mean-vs-zeta",
        mc.corrected_min_mean(),
        target,
        mc.std_errors[0],
        3.0,
        &format!(
            "grid MC of the valley minimum (stop-bias correction {:.2e}; horizon flag {})",
            mc.min_bias_estimate, mc.insufficient_horizon
        ),
    ));
    finish(report, start)
}

/// Criterion 9: Gaussian gap and shifted order statistics match their
/// root-k asymptotics at k = 400.
pub fn asymptotics_experiment(k: usize, n: usize, reps: usize, seed: u64) -> ExperimentReport {
    let start = Instant::now();
    let mut report =
        ExperimentReport::new("asymptotics", json!({"k": k, "n": n, "reps": reps}), seed);
    let spec = IncrementSpec::gaussian(1.0);
    let rows: Vec<(f64, f64)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let component = spec.clone();
            let mut tracker = LowestTracker::new(k);
            let mut s = 0.0f64;
            for _ in 0..n {
                s += component.draw(&mut rng);
                tracker.push(s);
            }
            (tracker.gap(k), tracker.shifted(k))
        })
        .collect();
    let nf = reps as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    // Finite-n correction: for Gaussian increments E S_m^- / m = 1/sqrt(2 pi m)
    // exactly, so the limit gap is the finite-n gap minus that term, and the
    // shifted statistic subtracts the partial sum of those terms.
    let gap_corr = 1.0 / (two_pi * (n - k + 1) as f64).sqrt();
    let shift_corr: f64 = (1..=k).map(|j| 1.0 / (two_pi * (n - j + 1) as f64).sqrt()).sum();

    let gaps: Vec<f64> = rows.iter().map(|r| (r.0 - gap_corr) * (k as f64).sqrt()).collect();
    let mean_gap = gaps.iter().sum::<f64>() / nf;
    let se_gap = standard_error(&gaps, mean_gap);
    report.push(CheckResult::relative(
        "gap-scaled",
        mean_gap,
        1.0 / two_pi.sqrt(),
        0.05,
        "sqrt(k) E D_k (finite-n term removed exactly) vs 1/sqrt(2 pi)",
    ));
    report.push(CheckResult::std_errors(
        "gap-scaled-se",
        mean_gap,
        1.0 / two_pi.sqrt(),
        se_gap,
        4.0,
        "same comparison in standard-error units (Gaussian makes the limit exact at every k)",
    ));

    let shifted: Vec<f64> =
        rows.iter().map(|r| (r.1 - shift_corr) / (k as f64).sqrt()).collect();
    let mean_shift = shifted.iter().sum::<f64>() / nf;
    report.push(CheckResult::relative(
        "shifted-scaled",
        mean_shift,
        (2.0 / std::f64::consts::PI).sqrt(),
        0.05,
        "E W_k / sqrt(k) vs sqrt(2/pi); the zeta(1/2) lag at k = 400 is ~3.7%",
    ));
    finish(report, start)
}

/// Criterion 10: the total variation to the limit decays at a measurable
/// power of n.
pub fn rate_experiment(reps: usize, seed: u64) -> ExperimentReport {
    let start = Instant::now();
    let grid = [100usize, 316, 1_000, 3_162, 10_000];
    let mut report =
        ExperimentReport::new("rate", json!({"n_grid": grid, "reps_per_point": reps}), seed);
    match rate_fit(&IncrementSpec::gaussian(1.0), 1, &grid, reps, seed) {
        Ok(fit) => {
            report.push(CheckResult::upper_bound(
                "slope-ci-upper",
                fit.slope_ci.1,
                -1e-9,
                &format!(
                    "95% CI upper end of the log-log slope (slope {:.3}, floor {:.2e}, tv {:?})",
                    fit.slope, fit.noise_floor, fit.tv
                ),
            ));
            // Soft monotonicity: counted, not gating, per the open rate question.
            let increases =
                fit.tv.windows(2).filter(|w| w[1] > w[0] * 1.25 + 2.0 * fit.noise_floor).count();
            report.push(CheckResult::upper_bound(
                "tv-monotone-soft",
                increases as f64,
                0.0,
                "grid points where TV rises materially against the trend",
            ));
        }
        Err(e) => {
            report.push(CheckResult::upper_bound(
                "slope-ci-upper",
                f64::INFINITY,
                -1e-9,
                &format!("rate fit failed: {e}"),
            ));
        }
    }
    finish(report, start)
}

/// Criterion 11: two-component mixture checks.
pub fn mixture_experiment(reps: usize, seed: u64) -> ExperimentReport {
    let start = Instant::now();
    let mut report = ExperimentReport::new("mixture", json!({"reps": reps, "k": 400, "n": 4000}), seed);
    let means = IncrementSpec::Mixture {
        components: vec![
            (0.5, IncrementSpec::Gaussian { mean: -1.0, sigma: 1.0 }),
            (0.5, IncrementSpec::Gaussian { mean: 1.0, sigma: 1.0 }),
        ],
    };
    for check in mixture_gap_checks(&means, 400, 4_000, reps, seed).checks {
        report.push(CheckResult { name: format!("means-{}", check.name), ..check });
    }
    let centered = IncrementSpec::Mixture {
        components: vec![
            (0.5, IncrementSpec::gaussian(1.0)),
            (0.5, IncrementSpec::gaussian(2.0)),
        ],
    };
    for check in mixture_gap_checks(&centered, 400, 4_000, reps, seed ^ 0xc0ffee).checks {
        report.push(CheckResult { name: format!("centered-{}", check.name), ..check });
    }
    finish(report, start)
}

/// Extra experiment: the embedded-walk discretization error against the
/// valley law (not part of the acceptance set; the fine-grid minimum biases
/// the comparison by O(1/sqrt(substeps))).
pub fn discretization_named(n: usize, substeps: usize, reps: usize, seed: u64) -> ExperimentReport {
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "discretization",
        json!({"n": n, "substeps": substeps, "reps": reps}),
        seed,
    );
    let disc = discretization_experiment(n, substeps, reps, seed);
    let negative = disc.samples.iter().filter(|s| **s < 0.0).count() as u64;
    report.push(CheckResult::exact(
        "difference-nonnegative",
        negative,
        "walk minimum never undercuts the fine-grid path minimum",
    ));
    report.push(CheckResult::relative(
        "mean-vs-valley",
        disc.mean,
        exact_valley_mean(),
        0.05,
        "fine-grid bias ~ 0.58/sqrt(substeps) is inside the 5% band",
    ));
    let valley = mc_valley_order_stats(0, 200_000, 200_000.min(reps * 25), seed ^ 0xfeed, 2e-3);
    let valley_min: Vec<f64> = valley.order_stat_samples(0).collect();
    let ks = ks_two_sample(&disc.samples, &valley_min);
    report.push(CheckResult::upper_bound(
        "ks-vs-valley-mc",
        ks,
        0.02,
        "two-sample KS between the discretization law and the valley MC law",
    ));
    finish(report, start)
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let l0 = lo.ln();
    let l1 = hi.ln();
    (0..points)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

fn standard_error(samples: &[f64], mean: f64) -> f64 {
    let n = samples.len() as f64;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
    (var / n).sqrt()
}
