//! Kolmogorov–Smirnov and chi-square test statistics.

use std::collections::BTreeMap;

/// One-sample KS statistic of `samples` against the CDF `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(samples.len() >= 2);
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(a.len() >= 2 && b.len() >= 2);
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    ys.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic two-sample KS p-value with the usual finite-sample effective
/// size correction.
pub fn ks_two_sample_p_value(d: f64, na: usize, nb: usize) -> f64 {
    let ne = (na as f64 * nb as f64) / (na + nb) as f64;
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    kolmogorov_q(lambda)
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Regularized upper incomplete gamma `Q(a, x)`, by series or continued
/// fraction depending on the regime.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let ln_gamma = libm::lgamma(a);
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    (sum * (-x + a * x.ln() - ln_gamma).exp()).clamp(0.0, 1.0)
}

fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let ln_gamma = libm::lgamma(a);
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    ((-x + a * x.ln() - ln_gamma).exp() * h).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi2Result {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Goodness-of-fit chi-square of observed counts against expected
/// probabilities. Cells are merged greedily from the tail until every
/// expected count is at least `min_expected`.
pub fn chi_square_gof(observed: &[u64], expected_probs: &[f64], min_expected: f64) -> Chi2Result {
    assert_eq!(observed.len(), expected_probs.len());
    let n: u64 = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> = observed
        .iter()
        .zip(expected_probs.iter())
        .map(|(o, p)| (*o as f64, p * n as f64))
        .collect();
    // Merge from the back while the smallest tail cell is under-filled.
    loop {
        if cells.len() <= 2 {
            break;
        }
        let last = cells.last().expect("nonempty");
        if last.1 >= min_expected {
            break;
        }
        let (o, e) = cells.pop().expect("nonempty");
        let prev = cells.last_mut().expect("nonempty");
        prev.0 += o;
        prev.1 += e;
    }
    let statistic: f64 =
        cells.iter().filter(|(_, e)| *e > 0.0).map(|(o, e)| (o - e) * (o - e) / e).sum();
    let df = cells.len().saturating_sub(1).max(1);
    Chi2Result { statistic, df, p_value: gamma_q(df as f64 / 2.0, statistic / 2.0) }
}

/// Two-sample chi-square homogeneity test over the union support, with
/// tail-merging of sparse cells under the pooled law.
pub fn chi_square_two_sample<K: Ord + Clone>(
    a: &BTreeMap<K, u64>,
    b: &BTreeMap<K, u64>,
    min_expected: f64,
) -> Chi2Result {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let keys: Vec<&K> = {
        let mut keys: Vec<&K> = a.keys().collect();
        for k in b.keys() {
            if !a.contains_key(k) {
                keys.push(k);
            }
        }
        keys.sort();
        keys
    };
    for k in keys {
        let oa = *a.get(k).unwrap_or(&0) as f64;
        let ob = *b.get(k).unwrap_or(&0) as f64;
        cells.push((oa, ob));
    }
    // Merge sparse cells from the back (pooled expected under min).
    let pooled_min = |oa: f64, ob: f64| {
        let tot = oa + ob;
        let ea = tot * na as f64 / (na + nb) as f64;
        let eb = tot * nb as f64 / (na + nb) as f64;
        ea.min(eb)
    };
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for cell in cells {
        merged.push(cell);
        // fold backwards while the tail stays sparse
        while merged.len() > 1 {
            let (oa, ob) = *merged.last().expect("nonempty");
            if pooled_min(oa, ob) >= min_expected {
                break;
            }
            let (oa, ob) = merged.pop().expect("nonempty");
            let prev = merged.last_mut().expect("nonempty");
            prev.0 += oa;
            prev.1 += ob;
        }
    }
    let mut statistic = 0.0;
    for (oa, ob) in &merged {
        let tot = oa + ob;
        if tot == 0.0 {
            continue;
        }
        let ea = tot * na as f64 / (na + nb) as f64;
        let eb = tot * nb as f64 / (na + nb) as f64;
        statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    }
    let df = merged.len().saturating_sub(1).max(1);
    Chi2Result { statistic, df, p_value: gamma_q(df as f64 / 2.0, statistic / 2.0) }
}
