//! Exact execution of shift circuits on product inputs, global depolarizing
//! noise, and ancilla readout in the σ_x / σ_y bases.
//!
//! Two engines compute the same ancilla outcome distribution:
//!
//! * a density-matrix engine that evolves the full `2^w × 2^w` state and
//!   applies the noise channel literally;
//! * an eigen-ensemble engine that expands every input over its spectrum,
//!   runs one statevector per pure product term and treats layer noise
//!   analytically. Global depolarizing is unital and commutes with every
//!   later gate, so after `L` noisy rounds the state is
//!   `(1−γ)^L · coherent + (1 − (1−γ)^L) · I/2^w`.

mod engines;
mod sampling;

pub use engines::MixtureState;
pub use sampling::{sample_bitstrings, sample_shots, SHOT_CHUNK};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{imaginary_mode, Circuit};
use crate::qstate::{DensityMatrix, StateError};

/// Widest circuit the density-matrix engine accepts.
pub const MAX_DENSITY_WIDTH: usize = 12;
/// Widest circuit the eigen-ensemble engine accepts.
pub const MAX_ENSEMBLE_WIDTH: usize = 24;
/// Largest ancilla count for which full distributions are formed.
pub const MAX_DISTRIBUTION_ANCILLAS: usize = 12;
/// Agreement required between engines in [`Engine::SelfCheck`] mode.
pub const ENGINE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{name} = {value} is outside {range}")]
    Range { name: &'static str, value: f64, range: &'static str },
    #[error("circuit width {width} exceeds the {engine} limit of {limit} qubits")]
    WidthLimit { width: usize, limit: usize, engine: &'static str },
    #[error("{ancillas} ancillas exceed the distribution limit of {limit}")]
    TooManyAncillas { ancillas: usize, limit: usize },
    #[error("circuit has {expected} registers but {found} input states were given")]
    InputCount { expected: usize, found: usize },
    #[error("input state {index} has {found} qubits, registers have {expected}")]
    InputSize { index: usize, expected: usize, found: usize },
    #[error("engines disagree by {deviation:e}")]
    EngineMismatch { deviation: f64 },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Global depolarizing noise: `state_noise` (γ₀) on every input state and
/// `layer_noise` (γ) on the whole register after each controlled-SWAP round.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    state_noise: f64,
    layer_noise: f64,
}

impl NoiseModel {
    pub fn new(state_noise: f64, layer_noise: f64) -> Result<Self, SimError> {
        check_unit("state_noise", state_noise)?;
        if !(0.0..1.0).contains(&layer_noise) {
            return Err(SimError::Range { name: "layer_noise", value: layer_noise, range: "[0, 1)" });
        }
        Ok(NoiseModel { state_noise, layer_noise })
    }

    pub fn noiseless() -> Self {
        NoiseModel::default()
    }

    /// Layer noise only.
    pub fn layers(gamma: f64) -> Result<Self, SimError> {
        Self::new(0.0, gamma)
    }

    pub fn state_noise(&self) -> f64 {
        self.state_noise
    }

    pub fn layer_noise(&self) -> f64 {
        self.layer_noise
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<(), SimError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(SimError::Range { name, value, range: "[0, 1]" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasurementBasis {
    X,
    Y,
}

/// Readout basis, shared by every ancilla of the circuit.
///
/// The `Y` readout is realized as an `S` phase on the leading ancilla
/// followed by the `X` readout, which turns the parity mean from the real
/// into the imaginary part of the shift expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementSpec {
    pub basis: MeasurementBasis,
}

impl MeasurementSpec {
    pub fn x() -> Self {
        MeasurementSpec { basis: MeasurementBasis::X }
    }

    pub fn y() -> Self {
        MeasurementSpec { basis: MeasurementBasis::Y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Eigen-ensemble.
    #[default]
    Auto,
    DensityMatrix,
    Ensemble,
    /// Run both engines and fail if they disagree beyond [`ENGINE_TOL`].
    SelfCheck,
}

/// Probability of every ancilla outcome. Index `b` reads ancilla 1 as its
/// most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaDistribution {
    ancillas: usize,
    probs: Vec<f64>,
}

impl AncillaDistribution {
    pub(crate) fn new(ancillas: usize, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), 1 << ancillas);
        AncillaDistribution { ancillas, probs }
    }

    pub fn ancillas(&self) -> usize {
        self.ancillas
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `E[(−1)^{ΣQ_i}]`.
    pub fn parity_expectation(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(b, p)| if b.count_ones() % 2 == 0 { *p } else { -*p })
            .sum()
    }

    pub fn bitstring(&self, index: usize) -> String {
        (0..self.ancillas).map(|k| if index >> (self.ancillas - 1 - k) & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.probs.iter().enumerate().map(|(b, p)| (self.bitstring(b), *p)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,probability\n");
        for (b, p) in self.probs.iter().enumerate() {
            let _ = writeln!(out, "{},{:.10e}", self.bitstring(b), p);
        }
        out
    }

    fn max_deviation(&self, other: &AncillaDistribution) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// `(1−γ₀)ρ + γ₀ I/2^n`.
pub fn depolarize_state(rho: &DensityMatrix, gamma: f64) -> Result<DensityMatrix, SimError> {
    check_unit("gamma", gamma)?;
    Ok(rho.mix_with_identity(gamma))
}

fn prepared_inputs(circuit: &Circuit, inputs: &[DensityMatrix], noise: &NoiseModel) -> Result<Vec<DensityMatrix>, SimError> {
    let expected = circuit.meta().m;
    if inputs.len() != expected {
        return Err(SimError::InputCount { expected, found: inputs.len() });
    }
    let n = circuit.meta().n;
    inputs
        .iter()
        .enumerate()
        .map(|(index, rho)| {
            if rho.n() != n {
                return Err(SimError::InputSize { index, expected: n, found: rho.n() });
            }
            if noise.state_noise > 0.0 {
                depolarize_state(rho, noise.state_noise)
            } else {
                Ok(rho.clone())
            }
        })
        .collect()
}

/// Full ancilla outcome distribution, computed with `engine`.
pub fn bitstring_distribution_with(
    circuit: &Circuit,
    inputs: &[DensityMatrix],
    noise: &NoiseModel,
    spec: &MeasurementSpec,
    engine: Engine,
) -> Result<AncillaDistribution, SimError> {
    let ancillas = circuit.ancillas().len();
    if ancillas > MAX_DISTRIBUTION_ANCILLAS {
        return Err(SimError::TooManyAncillas { ancillas, limit: MAX_DISTRIBUTION_ANCILLAS });
    }
    let inputs = prepared_inputs(circuit, inputs, noise)?;
    let phased;
    let circuit = match spec.basis {
        MeasurementBasis::X => circuit,
        MeasurementBasis::Y => {
            phased = imaginary_mode(circuit);
            &phased
        }
    };
    let gamma = noise.layer_noise;
    match engine {
        Engine::Auto | Engine::Ensemble => engines::ensemble_distribution(circuit, &inputs, gamma),
        Engine::DensityMatrix => engines::density_distribution(circuit, &inputs, gamma),
        Engine::SelfCheck => {
            let a = engines::density_distribution(circuit, &inputs, gamma)?;
            let b = engines::ensemble_distribution(circuit, &inputs, gamma)?;
            let deviation = a.max_deviation(&b);
            if deviation > ENGINE_TOL {
                return Err(SimError::EngineMismatch { deviation });
            }
            Ok(b)
        }
    }
}

/// Full ancilla outcome distribution in the given basis.
pub fn bitstring_distribution(
    circuit: &Circuit,
    inputs: &[DensityMatrix],
    noise: &NoiseModel,
    spec: &MeasurementSpec,
) -> Result<AncillaDistribution, SimError> {
    bitstring_distribution_with(circuit, inputs, noise, spec, Engine::Auto)
}

/// Exact ancilla parity expectation `E[(−1)^{ΣQ_i}]`.
pub fn run_exact(circuit: &Circuit, inputs: &[DensityMatrix], noise: &NoiseModel, spec: &MeasurementSpec) -> Result<f64, SimError> {
    run_exact_with(circuit, inputs, noise, spec, Engine::Auto)
}

pub fn run_exact_with(
    circuit: &Circuit,
    inputs: &[DensityMatrix],
    noise: &NoiseModel,
    spec: &MeasurementSpec,
    engine: Engine,
) -> Result<f64, SimError> {
    Ok(bitstring_distribution_with(circuit, inputs, noise, spec, engine)?.parity_expectation())
}
