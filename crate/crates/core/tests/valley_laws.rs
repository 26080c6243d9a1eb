//! Monte Carlo cross-checks of the valley special functions and survival
//! evaluators against the process they describe.

use rayon::prelude::*;

use orderwalk_core::rng::replica_rng;
use orderwalk_core::stats::hypothesis::ks_one_sample;
use orderwalk_core::valley::bes3::{sample_bes3_at, sample_bes3_grid, transition_from, transition_survival};
use orderwalk_core::valley::evaluator::{h_a, k_a, ValleyEvaluator};
use orderwalk_core::valley::mc::mc_valley_order_stats;
use orderwalk_core::valley::quad::integrate;
use orderwalk_core::valley::survival::{g_a_exact, valley_tail_exact};
use orderwalk_core::valley::{erfc, exact_valley_mean};

#[test]
fn k_a_matches_three_dimensional_normal_tail() {
    let reps = 1_000_000usize;
    let hits: u64 = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0xa1, r);
            (sample_bes3_at(1.0, &mut rng) > 1.0) as u64
        })
        .sum();
    let p = hits as f64 / reps as f64;
    let expect = k_a(1.0, 1.0);
    let se = (expect * (1.0 - expect) / reps as f64).sqrt();
    assert!((p - expect).abs() < 3.0 * se, "p = {p}, K = {expect}");
}

#[test]
fn h_a_matches_joint_transition_sampling() {
    // P(R(2) > 1, R(3) > 1) by entrance law plus one exact transition.
    let reps = 1_000_000usize;
    let hits: u64 = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0xa2, r);
            let x = sample_bes3_at(2.0, &mut rng);
            if x <= 1.0 {
                return 0;
            }
            (transition_from(x, &mut rng) > 1.0) as u64
        })
        .sum();
    let p = hits as f64 / reps as f64;
    let expect = h_a(1.0, 2.0);
    let se = (expect * (1.0 - expect) / reps as f64).sqrt();
    assert!((p - expect).abs() < 3.0 * se, "p = {p}, H = {expect}");
}

#[test]
fn bes3_scaling_law_ks() {
    // R(2)/sqrt(2) has the 3-dimensional standard normal norm law.
    let reps = 100_000usize;
    let samples: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(0xa3, r);
            let vals = sample_bes3_grid(&[0.5, 1.0, 2.0], &mut rng);
            vals[2] / 2.0f64.sqrt()
        })
        .collect();
    let chi3_cdf = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            // 1 - (sqrt(2/pi) x e^{-x^2/2} + erfc(x/sqrt 2))
            1.0 - ((2.0 / std::f64::consts::PI).sqrt() * x * (-x * x / 2.0).exp()
                + erfc(x / 2.0f64.sqrt()))
        }
    };
    let d = ks_one_sample(&samples, chi3_cdf);
    assert!(d < 1.95 / (reps as f64).sqrt(), "KS statistic {d}");
}

/// Single-arm grid-survival MC with the exact dip-probability correction
/// `2 W(a) / v` applied at the stopping height.
fn mc_grid_survival(a: f64, u: f64, reps: usize, seed: u64) -> (f64, f64) {
    use rand_distr::{Distribution, StandardNormal};
    let w_a = integrate(|y| y * y * transition_survival(y, a), 0.0, a, 1e-11)
        .unwrap()
        .value;
    let stop = 120.0 * a.max(0.4);
    let rows: Vec<(u64, f64)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let mut coords = [0.0f64; 3];
            let mut sd = u.sqrt();
            let mut k = 0usize;
            loop {
                let mut nsq = 0.0;
                for c in coords.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *c += sd * z;
                    nsq += *c * *c;
                }
                sd = 1.0;
                let v = nsq.sqrt();
                if v <= a {
                    return (0u64, 0.0);
                }
                k += 1;
                if k >= 48 && v > stop {
                    return (1u64, 2.0 * w_a / v);
                }
            }
        })
        .collect();
    let hits: u64 = rows.iter().map(|r| r.0).sum();
    let dip: f64 = rows.iter().map(|r| r.1).sum();
    let p = (hits as f64 - dip) / reps as f64;
    (p, (p * (1.0 - p) / reps as f64).sqrt())
}

#[test]
fn exact_survival_matches_grid_mc() {
    let (a, u) = (1.0, 0.5);
    let (mc, se) = mc_grid_survival(a, u, 1_000_000, 0xa4);
    let exact = g_a_exact(a, u).unwrap();
    assert!(
        (mc - exact.value).abs() < 3.0 * se + exact.residual_estimate,
        "MC {mc} +- {se} vs kernel {}",
        exact.value
    );
    // The pairwise-conditional product understates the same probability by
    // a percent-scale margin.
    let product = ValleyEvaluator::default().g_a(a, u).unwrap().value;
    assert!(product < exact.value - 6.0 * se, "product {product} vs exact {}", exact.value);
}

#[test]
fn valley_tail_at_mean_level_matches_mc() {
    let a = exact_valley_mean();
    let exact = valley_tail_exact(a).unwrap();
    let mc = mc_valley_order_stats(0, 400_000, 100_000, 0xa5, 3e-3);
    let p_emp =
        mc.order_stat_samples(0).filter(|m| *m > a).count() as f64 / mc.reps as f64;
    let se = (p_emp * (1.0 - p_emp) / mc.reps as f64).sqrt();
    // 3 SE for the MC side plus the kernel evaluator's documented accuracy.
    assert!(
        (p_emp - exact).abs() < 3.0 * se + 2e-3,
        "empirical {p_emp} vs exact {exact} (se {se})"
    );
}

#[test]
fn product_and_exact_tail_bracket_mc() {
    // At a = 1 the product form sits visibly below the exact tail.
    let ev = ValleyEvaluator::new(1e-6, 200_000, 1e-7);
    let product = ev.valley_tail(1.0).unwrap();
    let exact = valley_tail_exact(1.0).unwrap();
    assert!(product < exact, "product {product} vs exact {exact}");
    assert!((exact - product) / exact > 0.005, "gap unexpectedly small");
    assert!((exact - product) / exact < 0.10, "gap unexpectedly large");
}
