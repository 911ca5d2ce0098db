//! Shot-based estimators built on ancilla parity readout.
//!
//! A circuit run yields `(−1)^{ΣQ_i} ∈ {±1}`. In the `X` basis its mean is
//! `Re Tr(ρ₁⋯ρ_m)`, in the `Y` basis `Im Tr(ρ₁⋯ρ_m)`; with a controlled
//! Pauli `P_k` on one register it is `Tr(P_k ρ^m)` for equal inputs.
//! Numerators `Tr(Oρ^m)` combine one such run per Pauli term of `O`.

mod ratio;
mod report;
mod vd;

pub use ratio::{ratio_bootstrap, ratio_stats, RatioStats};
pub use report::{format_sig, EstimateReport, PartStats, RunInfo, TermReport};
pub use vd::{virtual_distillation, VDResult, DEGENERATE_DENOMINATOR};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{attach_observable, build_circuit, Circuit, CircuitError, CircuitMeta, Proposition};
use crate::oracle::OracleError;
use crate::qstate::{DensityMatrix, PauliObservable, PauliString};
use crate::schedule::SchedulePolicy;
use crate::simulator::{bitstring_distribution, run_exact, MeasurementBasis, MeasurementSpec, NoiseModel, SimError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("epsilon = {0} must be positive")]
    BadEpsilon(f64),
    #[error("delta = {0} must lie in (0, 1)")]
    BadDelta(f64),
    #[error("target variance = {0} must be positive")]
    BadTargetVariance(f64),
    #[error("observable has no terms with nonzero coefficient")]
    EmptyObservable,
    #[error("observable acts on {found} qubits, state has {expected}")]
    ObservableMismatch { expected: usize, found: usize },
    #[error("denominator estimate {value:e} is too close to zero")]
    DegenerateDenominator { value: f64 },
    #[error("shot count must be positive")]
    ZeroShots,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Additive error `ε` reached with probability at least `1 − δ`, and an
/// optional target variance `Δ²` for ratio planning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    epsilon: f64,
    delta: f64,
    target_variance: Option<f64>,
}

impl ErrorBudget {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self, EstimatorError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(EstimatorError::BadEpsilon(epsilon));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(EstimatorError::BadDelta(delta));
        }
        Ok(ErrorBudget { epsilon, delta, target_variance: None })
    }

    pub fn with_target_variance(mut self, target: f64) -> Result<Self, EstimatorError> {
        if !(target > 0.0 && target.is_finite()) {
            return Err(EstimatorError::BadTargetVariance(target));
        }
        self.target_variance = Some(target);
        Ok(self)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn target_variance(&self) -> Option<f64> {
        self.target_variance
    }
}

impl Default for ErrorBudget {
    fn default() -> Self {
        ErrorBudget { epsilon: 0.1, delta: 0.05, target_variance: None }
    }
}

/// Shots per measurement basis: `⌈2·ln(2/δ)/(ε/2)²⌉`.
///
/// Hoeffding for outcomes in `[−1, 1]` gives `Pr(|mean − E| ≥ t) ≤
/// 2·exp(−N t²/2)`; each of the real and imaginary parts gets `t = ε/2`.
pub fn plan_shots(budget: &ErrorBudget) -> u64 {
    let half = budget.epsilon / 2.0;
    (2.0 * (2.0 / budget.delta).ln() / (half * half)).ceil() as u64
}

/// Which circuit variant runs the estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CircuitFamily {
    pub s: usize,
    pub proposition: Proposition,
    pub policy: SchedulePolicy,
    /// Register (1-based) receiving the controlled Pauli of a numerator term.
    pub target_register: usize,
}

impl CircuitFamily {
    pub fn new(s: usize, proposition: Proposition) -> Self {
        CircuitFamily { s, proposition, policy: SchedulePolicy::Greedy, target_register: 1 }
    }

    pub fn build(&self, m: usize, n: usize) -> Result<Circuit, CircuitError> {
        build_circuit(CircuitMeta { m, n, s: self.s, proposition: self.proposition, policy: self.policy })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exact parity expectations.
    Exact,
    /// Seeded shot sampling.
    #[default]
    Shots,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOptions {
    pub family: CircuitFamily,
    pub budget: ErrorBudget,
    pub noise: NoiseModel,
    pub mode: Mode,
    /// Overrides the planned shot count of every measured part.
    pub shots: Option<u64>,
    pub seed: u64,
}

impl EstimatorOptions {
    pub fn new(family: CircuitFamily, seed: u64) -> Self {
        EstimatorOptions {
            family,
            budget: ErrorBudget::default(),
            noise: NoiseModel::noiseless(),
            mode: Mode::Shots,
            shots: None,
            seed,
        }
    }

    fn shots_for(&self, budget: &ErrorBudget) -> Result<u64, EstimatorError> {
        match (self.mode, self.shots) {
            (Mode::Exact, _) => Ok(0),
            (Mode::Shots, Some(0)) => Err(EstimatorError::ZeroShots),
            (Mode::Shots, Some(n)) => Ok(n),
            (Mode::Shots, None) => Ok(plan_shots(budget)),
        }
    }

    fn info(&self, m: usize, n: usize) -> RunInfo {
        RunInfo {
            m,
            n,
            s: self.family.s,
            proposition: self.family.proposition.number(),
            policy: self.family.policy.to_string(),
            gamma: self.noise.layer_noise(),
            gamma0: self.noise.state_noise(),
            seed: self.seed,
            mode: self.mode,
        }
    }
}

/// Independent sub-seed for a labelled stream (splitmix64 finalizer).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const TAG_MT_X: u64 = 1;
const TAG_MT_Y: u64 = 2;
const TAG_DENOMINATOR: u64 = 3;
const TAG_TERM: u64 = 1 << 32;

/// Mean and variance of the parity outcome of one circuit.
#[allow(clippy::too_many_arguments)]
pub(crate) fn measure(
    label: &str,
    circuit: &Circuit,
    inputs: &[DensityMatrix],
    noise: &NoiseModel,
    basis: MeasurementBasis,
    mode: Mode,
    shots: u64,
    seed: u64,
) -> Result<PartStats, EstimatorError> {
    let spec = MeasurementSpec { basis };
    match mode {
        Mode::Exact => {
            let mean = run_exact(circuit, inputs, noise, &spec)?;
            Ok(PartStats { label: label.to_string(), basis, shots: 0, mean, variance: 1.0 - mean * mean })
        }
        Mode::Shots => {
            let dist = bitstring_distribution(circuit, inputs, noise, &spec)?;
            let outcomes = dist.sample_parities(shots as usize, seed);
            Ok(PartStats::from_outcomes(label, basis, &outcomes))
        }
    }
}

/// `⟨V̂⟩ = ⟨Q̂⟩ + i⟨R̂⟩`, estimating `Tr(ρ₁⋯ρ_m)` from `X` and `Y` readouts
/// of `N` shots each.
pub fn estimate_mt(states: &[DensityMatrix], opts: &EstimatorOptions) -> Result<EstimateReport, EstimatorError> {
    let m = states.len();
    let n = states.first().map_or(0, |r| r.n());
    let circuit = opts.family.build(m, n)?;
    let shots = opts.shots_for(&opts.budget)?;
    let (q, r) = rayon::join(
        || measure("X", &circuit, states, &opts.noise, MeasurementBasis::X, opts.mode, shots, derive_seed(opts.seed, TAG_MT_X)),
        || measure("Y", &circuit, states, &opts.noise, MeasurementBasis::Y, opts.mode, shots, derive_seed(opts.seed, TAG_MT_Y)),
    );
    let (q, r) = (q?, r?);
    let per_shot = q.variance + r.variance;
    Ok(EstimateReport {
        value: Complex64::new(q.mean, r.mean),
        shots_used: 2 * shots,
        copies_used: 2 * shots * m as u64,
        empirical_variance: per_shot,
        standard_error: if shots > 0 { (per_shot / shots as f64).sqrt() } else { 0.0 },
        budget: opts.budget,
        parts: vec![q, r],
        terms: Vec::new(),
        info: opts.info(m, n),
    })
}

fn check_observable(rho: &DensityMatrix, o: &PauliObservable) -> Result<(), EstimatorError> {
    if o.n() != rho.n() {
        return Err(EstimatorError::ObservableMismatch { expected: rho.n(), found: o.n() });
    }
    if o.coefficient_norm() == 0.0 {
        return Err(EstimatorError::EmptyObservable);
    }
    Ok(())
}

/// `𝒲̂ = Σ_k a_k Ŵ_k`, estimating `Tr(Oρ^m)`.
///
/// Term `k` runs the shift circuit with a controlled `P_k` appended and
/// gets budget `ε_k = ε / Σ|a_k|`.
pub fn estimate_numerator(
    rho: &DensityMatrix,
    m: usize,
    o: &PauliObservable,
    opts: &EstimatorOptions,
) -> Result<EstimateReport, EstimatorError> {
    check_observable(rho, o)?;
    let n = rho.n();
    let base = opts.family.build(m, n)?;
    let inputs = vec![rho.clone(); m];
    let c = o.coefficient_norm();
    let term_budget = ErrorBudget::new(opts.budget.epsilon / c, opts.budget.delta)?;
    let shots = opts.shots_for(&term_budget)?;

    let terms = o
        .terms()
        .par_iter()
        .enumerate()
        .map(|(k, term)| {
            let circuit = attach_observable(&base, &term.string, opts.family.target_register)?;
            let label = term.string.to_string();
            let seed = derive_seed(opts.seed, TAG_TERM + k as u64);
            let stats = measure(&label, &circuit, &inputs, &opts.noise, MeasurementBasis::X, opts.mode, shots, seed)?;
            Ok(TermReport { coefficient: term.coeff, pauli: label, epsilon: term_budget.epsilon, stats })
        })
        .collect::<Result<Vec<_>, EstimatorError>>()?;

    Ok(combine_terms(terms, shots, m, opts, n))
}

fn combine_terms(terms: Vec<TermReport>, shots: u64, m: usize, opts: &EstimatorOptions, n: usize) -> EstimateReport {
    let value: f64 = terms.iter().map(|t| t.coefficient * t.stats.mean).sum();
    let per_shot: f64 = terms.iter().map(|t| t.coefficient * t.coefficient * t.stats.variance).sum();
    let total = shots * terms.len() as u64;
    EstimateReport {
        value: Complex64::new(value, 0.0),
        shots_used: total,
        copies_used: total * m as u64,
        empirical_variance: per_shot,
        standard_error: if shots > 0 { (per_shot / shots as f64).sqrt() } else { 0.0 },
        budget: opts.budget,
        parts: Vec::new(),
        terms,
        info: opts.info(m, n),
    }
}

/// `Ŷ`, estimating `Tr(ρ^m)` with the plain shift circuit.
pub(crate) fn estimate_denominator(rho: &DensityMatrix, m: usize, opts: &EstimatorOptions) -> Result<EstimateReport, EstimatorError> {
    let n = rho.n();
    let circuit = opts.family.build(m, n)?;
    let inputs = vec![rho.clone(); m];
    let shots = opts.shots_for(&opts.budget)?;
    let seed = derive_seed(opts.seed, TAG_DENOMINATOR);
    let label = PauliString::identity(n).to_string();
    let x = measure(&label, &circuit, &inputs, &opts.noise, MeasurementBasis::X, opts.mode, shots, seed)?;
    let mut report = EstimateReport {
        value: Complex64::new(x.mean, 0.0),
        shots_used: shots,
        copies_used: shots * m as u64,
        empirical_variance: x.variance,
        standard_error: if shots > 0 { (x.variance / shots as f64).sqrt() } else { 0.0 },
        budget: opts.budget,
        parts: vec![x],
        terms: Vec::new(),
        info: opts.info(m, n),
    };
    if opts.mode == Mode::Exact {
        // imaginary residue as a diagnostic; zero for equal Hermitian inputs
        let y = measure(&label, &circuit, &inputs, &opts.noise, MeasurementBasis::Y, Mode::Exact, 0, 0)?;
        report.value.im = y.mean;
        report.parts.push(y);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planned_shots() {
        let b = ErrorBudget::new(0.1, 0.05).unwrap();
        assert_eq!(plan_shots(&b), 2952);
        let half = ErrorBudget::new(0.05, 0.05).unwrap();
        let ratio = plan_shots(&half) as f64 / plan_shots(&b) as f64;
        assert!((ratio - 4.0).abs() < 2e-3);
        let tight = ErrorBudget::new(0.1, 0.005).unwrap();
        let ratio = plan_shots(&tight) as f64 / plan_shots(&b) as f64;
        assert!((ratio - 400f64.ln() / 40f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn budget_validation() {
        assert_eq!(ErrorBudget::new(0.0, 0.1), Err(EstimatorError::BadEpsilon(0.0)));
        assert_eq!(ErrorBudget::new(0.1, 1.0), Err(EstimatorError::BadDelta(1.0)));
        assert!(ErrorBudget::new(0.1, 0.1).unwrap().with_target_variance(-1.0).is_err());
    }

    #[test]
    fn seeds_are_distinct() {
        let a: Vec<u64> = (0..100).map(|t| derive_seed(7, t)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(b.len(), a.len());
        assert_ne!(derive_seed(7, 1), derive_seed(8, 1));
    }

    #[test]
    fn identical_pure_states_estimate_one() {
        let rho = DensityMatrix::basis(1, 1);
        let opts = EstimatorOptions::new(CircuitFamily::new(1, Proposition::Sequential), 5);
        let r = estimate_mt(&[rho.clone(), rho], &opts).unwrap();
        assert_eq!(r.parts[0].mean, 1.0);
        assert!(r.parts[1].mean.abs() < 0.1);
        assert_eq!(r.shots_used, 2 * 2952);
    }

    #[test]
    fn identity_numerator_matches_denominator() {
        let rho = DensityMatrix::maximally_mixed(1);
        let mut opts = EstimatorOptions::new(CircuitFamily::new(1, Proposition::Sequential), 5);
        opts.mode = Mode::Exact;
        let num = estimate_numerator(&rho, 3, &PauliObservable::identity(1), &opts).unwrap();
        let den = estimate_denominator(&rho, 3, &opts).unwrap();
        assert!((num.value.re - den.value.re).abs() < 1e-12);
        assert!((num.value.re - 0.25).abs() < 1e-12);
    }

    #[test]
    fn term_budgets_split_epsilon() {
        let rho = DensityMatrix::basis(2, 0);
        let o = PauliObservable::mean_z(2);
        let opts = EstimatorOptions::new(CircuitFamily::new(1, Proposition::Sequential), 1);
        let r = estimate_numerator(&rho, 2, &o, &opts).unwrap();
        assert_eq!(r.terms.len(), 2);
        assert!((r.terms[0].epsilon - 0.1).abs() < 1e-15);
        let r = estimate_numerator(&rho, 2, &o.scaled(3.0), &opts).unwrap();
        assert!((r.terms[0].epsilon - 0.1 / 3.0).abs() < 1e-15);
        assert_eq!(r.shots_used, 2 * plan_shots(&ErrorBudget::new(0.1 / 3.0, 0.05).unwrap()));
        assert_eq!(r.copies_used, 2 * r.shots_used);
    }

    #[test]
    fn empty_observable_rejected() {
        let rho = DensityMatrix::basis(1, 0);
        let o = PauliObservable::from_pairs(1, &[(0.0, "Z")]).unwrap();
        let opts = EstimatorOptions::new(CircuitFamily::new(1, Proposition::Sequential), 1);
        assert_eq!(estimate_numerator(&rho, 2, &o, &opts).unwrap_err(), EstimatorError::EmptyObservable);
    }
}
