use rayon::prelude::*;
use serde::Serialize;

use super::{derive_seed, EstimatorError, EstimatorOptions, TAG_DENOMINATOR, TAG_TERM};
use crate::circuit::attach_observable;
use crate::oracle;
use crate::qstate::{DensityMatrix, PauliObservable};
use crate::simulator::{bitstring_distribution, MeasurementSpec};

/// Small-sample statistics of the ratio `⟨X̂⟩/⟨Ŷ⟩` with `N` shots per part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioStats {
    /// `Tr(Oρ^m)[1−Tr(ρ^m)²]² / (N·Tr(ρ^m)³)`.
    pub mean_correction: f64,
    /// `X/Y + mean_correction`.
    pub approx_mean: f64,
    /// `Tr(Oρ^m)²[1−Tr(ρ^m)²]²/(N·Tr(ρ^m)⁴) + Σ|a_k|²[1−Tr(P_kρ^m)²]/(N·Tr(ρ^m)²)`.
    pub variance: f64,
    /// First-order delta method, `(X²·Var Ŷ/Y⁴ + Var X̂/Y²)/N`, for comparison.
    pub delta_method_variance: f64,
    /// `N` reaching the target variance `Δ²` under the `variance` formula.
    pub shots_for_target: Option<u64>,
}

/// Mean and variance approximations for the ratio estimator.
///
/// `num` and `den` stand in for `Tr(Oρ^m)` and `Tr(ρ^m)`; the per-term
/// values `Tr(P_kρ^m)` are computed densely from `rho`.
pub fn ratio_stats(
    num: f64,
    den: f64,
    o: &PauliObservable,
    rho: &DensityMatrix,
    m: usize,
    shots: u64,
    target_variance: Option<f64>,
) -> Result<RatioStats, EstimatorError> {
    if den == 0.0 {
        return Err(EstimatorError::DegenerateDenominator { value: den });
    }
    if shots == 0 {
        return Err(EstimatorError::ZeroShots);
    }
    let var_x = o
        .terms()
        .iter()
        .map(|t| {
            let single = PauliObservable::new(o.n(), vec![crate::qstate::PauliTerm { coeff: 1.0, string: t.string.clone() }])
                .expect("term matches observable width");
            let tr = oracle::oracle(rho, m, &single)?.tr_o_rho_m;
            Ok(t.coeff * t.coeff * (1.0 - tr * tr))
        })
        .sum::<Result<f64, EstimatorError>>()?;
    let var_y = 1.0 - den * den;
    let n = shots as f64;

    let first = num * num * var_y * var_y / den.powi(4);
    let second = var_x / (den * den);
    let mean_correction = num * var_y * var_y / (n * den.powi(3));
    Ok(RatioStats {
        mean_correction,
        approx_mean: num / den + mean_correction,
        variance: (first + second) / n,
        delta_method_variance: (num * num * var_y / den.powi(4) + second) / n,
        shots_for_target: target_variance.map(|d2| ((first + second) / d2).ceil() as u64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapStats {
    pub trials: usize,
    pub mean: f64,
    pub variance: f64,
}

/// Empirical mean and variance of `⟨X̂⟩/⟨Ŷ⟩` over seeded repetitions, each
/// with `shots` samples per Pauli term and for the denominator.
///
/// Outcome distributions are computed once and resampled.
pub fn ratio_bootstrap(
    rho: &DensityMatrix,
    m: usize,
    o: &PauliObservable,
    opts: &EstimatorOptions,
    shots: u64,
    trials: usize,
) -> Result<BootstrapStats, EstimatorError> {
    if shots == 0 {
        return Err(EstimatorError::ZeroShots);
    }
    let base = opts.family.build(m, rho.n())?;
    let inputs = vec![rho.clone(); m];
    let spec = MeasurementSpec::x();
    let den_dist = bitstring_distribution(&base, &inputs, &opts.noise, &spec)?;
    let term_dists = o
        .terms()
        .iter()
        .map(|t| {
            let c = attach_observable(&base, &t.string, opts.family.target_register)?;
            Ok((t.coeff, bitstring_distribution(&c, &inputs, &opts.noise, &spec)?))
        })
        .collect::<Result<Vec<_>, EstimatorError>>()?;

    let mean_of = |xs: Vec<i8>| xs.iter().map(|&x| x as i64).sum::<i64>() as f64 / xs.len() as f64;
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(opts.seed, trial as u64);
            let den = mean_of(den_dist.sample_parities(shots as usize, derive_seed(seed, TAG_DENOMINATOR)));
            let num: f64 = term_dists
                .iter()
                .enumerate()
                .map(|(k, (a, d))| a * mean_of(d.sample_parities(shots as usize, derive_seed(seed, TAG_TERM + k as u64))))
                .sum();
            num / den
        })
        .collect();
    let t = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / t;
    let variance = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (t - 1.0);
    Ok(BootstrapStats { trials, mean, variance })
}
