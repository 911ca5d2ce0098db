use num_complex::Complex64;
use serde::Serialize;

use super::{ErrorBudget, Mode};
use crate::simulator::MeasurementBasis;

/// Format with `digits` significant digits, plain decimal where that stays
/// short and scientific otherwise.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.prec$e}", prec = digits - 1)
    }
}

pub(crate) fn sig10(x: f64) -> String {
    format_sig(x, 10)
}

/// One measured circuit: its readout basis, shot count and parity moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartStats {
    pub label: String,
    pub basis: MeasurementBasis,
    /// Zero in exact mode.
    pub shots: u64,
    pub mean: f64,
    /// Per-shot variance: the sample variance with shots, `1 − mean²` exactly.
    pub variance: f64,
}

impl PartStats {
    pub fn from_outcomes(label: &str, basis: MeasurementBasis, outcomes: &[i8]) -> Self {
        let n = outcomes.len() as f64;
        let sum: i64 = outcomes.iter().map(|&x| x as i64).sum();
        let mean = sum as f64 / n;
        // for ±1 outcomes Σx² = N
        let variance = if outcomes.len() > 1 { (n - n * mean * mean) / (n - 1.0) } else { 0.0 };
        PartStats { label: label.to_string(), basis, shots: outcomes.len() as u64, mean, variance: variance.max(0.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermReport {
    pub coefficient: f64,
    pub pauli: String,
    /// `ε_k`.
    pub epsilon: f64,
    pub stats: PartStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunInfo {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub proposition: u8,
    pub policy: String,
    pub gamma: f64,
    pub gamma0: f64,
    pub seed: u64,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub value: Complex64,
    /// Circuit repetitions over all parts.
    pub shots_used: u64,
    /// Copies of the input consumed, `m` per repetition.
    pub copies_used: u64,
    /// Per-shot variance of the combined estimator.
    pub empirical_variance: f64,
    /// Standard error of `value`.
    pub standard_error: f64,
    pub budget: ErrorBudget,
    /// Basis breakdown (`X`, `Y`).
    pub parts: Vec<PartStats>,
    /// Per Pauli term, numerators only.
    pub terms: Vec<TermReport>,
    pub info: RunInfo,
}

pub const CSV_HEADER: &str = "m,n,s,proposition,gamma,gamma0,shots,value,variance,seed,value_im";

impl EstimateReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn csv_header() -> &'static str {
        CSV_HEADER
    }

    /// One CSV row; `variance` is the squared standard error.
    pub fn csv_row(&self) -> String {
        let i = &self.info;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            i.m,
            i.n,
            i.s,
            i.proposition,
            sig10(i.gamma),
            sig10(i.gamma0),
            self.shots_used,
            sig10(self.value.re),
            sig10(self.standard_error * self.standard_error),
            i.seed,
            sig10(self.value.im)
        )
    }
}
