use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    derive_seed, estimate_denominator, estimate_numerator, report::sig10, EstimateReport, EstimatorError, EstimatorOptions,
    Mode, PartStats, TermReport, TAG_TERM,
};
use crate::qstate::{DensityMatrix, PauliObservable, PauliTerm};
use crate::simulator::{depolarize_state, MeasurementBasis};

/// Denominator magnitudes below this are rejected.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VDResult {
    pub m: usize,
    /// `⟨O⟩_vd^(m)`, the ratio of the real parts.
    pub corrected: f64,
    /// `Tr(Oρ)` of the (state-noise-depolarized) input.
    pub noisy: f64,
    /// `Tr(Oρ_ideal)`, when an ideal state is known.
    pub ideal: Option<f64>,
    /// Delta-method variance of `corrected` from the part variances; zero in
    /// exact mode.
    pub variance: f64,
    pub numerator: EstimateReport,
    pub denominator: EstimateReport,
}

impl VDResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn csv_header() -> &'static str {
        "m,n,s,proposition,gamma,gamma0,shots,value,variance,seed"
    }

    pub fn csv_row(&self) -> String {
        let i = &self.numerator.info;
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            i.m,
            i.n,
            i.s,
            i.proposition,
            sig10(i.gamma),
            sig10(i.gamma0),
            self.numerator.shots_used + self.denominator.shots_used,
            sig10(self.corrected),
            sig10(self.variance),
            i.seed
        )
    }
}

fn single(o: &PauliObservable, t: &PauliTerm) -> PauliObservable {
    PauliObservable::new(o.n(), vec![PauliTerm { coeff: 1.0, string: t.string.clone() }]).expect("same width")
}

/// `m = 1`: no shift circuit; each term is a direct `P_k` measurement on
/// the input and the denominator is exactly one.
fn single_copy(rho: &DensityMatrix, o: &PauliObservable, opts: &EstimatorOptions) -> Result<(EstimateReport, EstimateReport), EstimatorError> {
    let c = o.coefficient_norm();
    let term_budget = super::ErrorBudget::new(opts.budget.epsilon() / c, opts.budget.delta())?;
    let shots = opts.shots_for(&term_budget)?;
    let mut terms = Vec::new();
    for (k, t) in o.terms().iter().enumerate() {
        let label = t.string.to_string();
        let exact = rho.expectation(&single(o, t));
        let stats = match opts.mode {
            Mode::Exact => PartStats { label: label.clone(), basis: MeasurementBasis::X, shots: 0, mean: exact, variance: 1.0 - exact * exact },
            Mode::Shots => {
                let p = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
                let coin = Bernoulli::new(p).expect("probability in range");
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, TAG_TERM + k as u64));
                let outcomes: Vec<i8> = (0..shots).map(|_| if coin.sample(&mut rng) { 1 } else { -1 }).collect();
                PartStats::from_outcomes(&label, MeasurementBasis::X, &outcomes)
            }
        };
        terms.push(TermReport { coefficient: t.coeff, pauli: label, epsilon: term_budget.epsilon(), stats });
    }
    let numerator = super::combine_terms(terms, shots, 1, opts, rho.n());
    let denominator = EstimateReport {
        value: num_complex::Complex64::new(1.0, 0.0),
        shots_used: 0,
        copies_used: 0,
        empirical_variance: 0.0,
        standard_error: 0.0,
        budget: opts.budget,
        parts: Vec::new(),
        terms: Vec::new(),
        info: opts.info(1, rho.n()),
    };
    Ok((numerator, denominator))
}

/// `⟨O⟩_vd^(m) = Tr(Oρ^m) / Tr(ρ^m)` through the shift circuit family.
///
/// The input is first depolarized with the state noise of `opts.noise`;
/// layer noise acts inside the circuits. Numerator and denominator use
/// independent shot streams.
pub fn virtual_distillation(
    rho: &DensityMatrix,
    m: usize,
    o: &PauliObservable,
    opts: &EstimatorOptions,
) -> Result<VDResult, EstimatorError> {
    super::check_observable(rho, o)?;
    let rho = depolarize_state(rho, opts.noise.state_noise())?;
    // the state noise is now part of the input
    let mut inner = opts.clone();
    inner.noise = crate::simulator::NoiseModel::layers(opts.noise.layer_noise())?;

    let (mut numerator, mut denominator) = if m == 1 {
        single_copy(&rho, o, &inner)?
    } else {
        let (num, den) = rayon::join(|| estimate_numerator(&rho, m, o, &inner), || estimate_denominator(&rho, m, &inner));
        (num?, den?)
    };
    let restore = |r: &mut EstimateReport| {
        r.info.gamma0 = opts.noise.state_noise();
    };
    restore(&mut numerator);
    restore(&mut denominator);

    let (x, y) = (numerator.value.re, denominator.value.re);
    if y.abs() < DEGENERATE_DENOMINATOR {
        return Err(EstimatorError::DegenerateDenominator { value: y });
    }
    let (se_x, se_y) = (numerator.standard_error, denominator.standard_error);
    let variance = se_x * se_x / (y * y) + x * x * se_y * se_y / y.powi(4);
    Ok(VDResult {
        m,
        corrected: x / y,
        noisy: rho.expectation(o),
        ideal: None,
        variance,
        numerator,
        denominator,
    })
}
