//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 15-point Kronrod rule with the embedded 7-point Gauss rule supplies the
//! per-interval error estimate; intervals are split worst-first until the
//! total estimated error is below tolerance. Summation order is fixed by the
//! subdivision sequence, so results are reproducible.

use thiserror::Error;

/// Kronrod abscissae on [0, 1] side (symmetric), 15-point rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// Embedded 7-point Gauss weights (for the odd Kronrod abscissae).
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not converge: value ~ {value}, error estimate {error}")]
    NoConvergence { value: f64, error: f64 },
}

fn kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kron.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kron * half;
    let err = ((kron - gauss) * half).abs();
    // Scale the raw difference the way QUADPACK does, to avoid wild
    // overestimates on smooth integrands.
    let res_abs = res_abs * half.abs();
    let scaled = if res_abs > 0.0 && err > 0.0 {
        let r = (200.0 * err / res_abs).powf(1.5);
        if r < 1.0 {
            res_abs * r
        } else {
            err.min(res_abs)
        }
    } else {
        err
    };
    (value, scaled.max(err * 1e-4))
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult, QuadError> {
    integrate_with_limit(f, a, b, tol, 4000)
}

/// The 15 Kronrod abscissae and weights on `[a, b]`, for callers that build
/// fixed composite rules and want to schedule the evaluations themselves.
pub fn kronrod_points(a: f64, b: f64) -> Vec<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut pts = Vec::with_capacity(15);
    for j in 0..7 {
        pts.push((center - half * XGK[j], WGK[j] * half));
        pts.push((center + half * XGK[j], WGK[j] * half));
    }
    pts.push((center, WGK[7] * half));
    pts
}

/// Integrate with an explicit cap on interval subdivisions.
pub fn integrate_with_limit<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
) -> Result<QuadResult, QuadError> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evals: 0 });
    }
    let (v, e) = kronrod_15(&f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut evals = 15usize;
    loop {
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if total_err <= tol {
            let value = intervals.iter().map(|iv| iv.2).sum();
            return Ok(QuadResult { value, error: total_err, evals });
        }
        if intervals.len() >= max_intervals {
            let value = intervals.iter().map(|iv| iv.2).sum();
            return Err(QuadError::NoConvergence { value, error: total_err });
        }
        // Split the interval with the largest error estimate.
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod_15(&f, lo, mid);
        let (v2, e2) = kronrod_15(&f, mid, hi);
        evals += 30;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Integrate `f` over `[a, inf)` to absolute tolerance `tol`, by mapping
/// `x = a + t/(1-t)` onto `t` in `[0, 1)`.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<QuadResult, QuadError> {
    let g = |t: f64| {
        let one_minus = 1.0 - t;
        if one_minus <= 0.0 {
            return 0.0;
        }
        let x = a + t / one_minus;
        let jac = 1.0 / (one_minus * one_minus);
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_near_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12).unwrap();
        // antiderivative x^4/4 - x^2 + x: F(3)-F(-1) = (81/4-9+3)-(1/4-1-1)=16
        assert!((r.value - 16.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate(|x| (-x * x / 2.0).exp(), -40.0, 40.0, 1e-12).unwrap();
        assert!((r.value - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn infinite_tail() {
        let r = integrate_to_inf(|x| (-x).exp(), 0.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn peaked_integrand_subdivides() {
        let r = integrate(|x: f64| 1.0 / (1e-6 + x * x), -1.0, 1.0, 1e-9).unwrap();
        let exact = 2.0 * (1.0 / 1e-3) * (1.0f64 / 1e-3).atan();
        assert!((r.value - exact).abs() < 1e-6 * exact, "{} vs {exact}", r.value);
    }
}
