//! Experiment reports: every verification run records its settings, seed,
//! per-check tolerances and outcomes in one serializable structure.

use serde::{Deserialize, Serialize};

/// How a check's tolerance is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceKind {
    /// `|observed - expected| <= tolerance`.
    Absolute,
    /// `|observed - expected| <= tolerance * |expected|`.
    Relative,
    /// `|observed - expected| <= tolerance * standard_error`.
    StdErrors,
    /// `observed` is a p-value that must be `>= tolerance`.
    PValue,
    /// `observed` must be exactly 0 (exact-arithmetic identity checks).
    Exact,
    /// `observed <= tolerance`.
    UpperBound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub kind: ToleranceKind,
    /// Standard error when `kind == StdErrors`, otherwise 0.
    pub std_error: f64,
    pub passed: bool,
    /// Where the expected value / tolerance comes from.
    pub note: String,
}

impl CheckResult {
    pub fn exact(name: &str, discrepancies: u64, note: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            observed: discrepancies as f64,
            expected: 0.0,
            tolerance: 0.0,
            kind: ToleranceKind::Exact,
            std_error: 0.0,
            passed: discrepancies == 0,
            note: note.to_string(),
        }
    }

    pub fn absolute(name: &str, observed: f64, expected: f64, tol: f64, note: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            observed,
            expected,
            tolerance: tol,
            kind: ToleranceKind::Absolute,
            std_error: 0.0,
            passed: (observed - expected).abs() <= tol,
            note: note.to_string(),
        }
    }

    pub fn relative(name: &str, observed: f64, expected: f64, tol: f64, note: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            observed,
            expected,
            tolerance: tol,
            kind: ToleranceKind::Relative,
            std_error: 0.0,
            passed: (observed - expected).abs() <= tol * expected.abs(),
            note: note.to_string(),
        }
    }

    pub fn std_errors(
        name: &str,
        observed: f64,
        expected: f64,
        se: f64,
        multiple: f64,
        note: &str,
    ) -> Self {
        CheckResult {
            name: name.to_string(),
            observed,
            expected,
            tolerance: multiple,
            kind: ToleranceKind::StdErrors,
            std_error: se,
            passed: (observed - expected).abs() <= multiple * se,
            note: note.to_string(),
        }
    }

    pub fn p_value(name: &str, p: f64, threshold: f64, note: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            observed: p,
            expected: 1.0,
            tolerance: threshold,
            kind: ToleranceKind::PValue,
            std_error: 0.0,
            passed: p >= threshold,
            note: note.to_string(),
        }
    }

    pub fn upper_bound(name: &str, observed: f64, bound: f64, note: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            observed,
            expected: 0.0,
            tolerance: bound,
            kind: ToleranceKind::UpperBound,
            std_error: 0.0,
            passed: observed <= bound,
            note: note.to_string(),
        }
    }
}

/// Outcome of one named verification experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub name: String,
    pub settings: serde_json::Value,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    pub wall_ms: u128,
}

impl ExperimentReport {
    pub fn new(name: &str, settings: serde_json::Value, seed: u64) -> Self {
        ExperimentReport {
            schema: 1,
            name: name.to_string(),
            settings,
            seed,
            checks: Vec::new(),
            passed: true,
            wall_ms: 0,
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    /// One line per check: `PASS name: observed vs expected (tolerance)`.
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{} {} :: {} = {:.6e} vs {:.6e} (tol {:.2e} {:?})",
                    if c.passed { "PASS" } else { "FAIL" },
                    self.name,
                    c.name,
                    c.observed,
                    c.expected,
                    c.tolerance,
                    c.kind
                )
            })
            .collect()
    }
}
