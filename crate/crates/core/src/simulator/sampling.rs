use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{bitstring_distribution, AncillaDistribution, MeasurementSpec, NoiseModel, SimError};
use crate::circuit::Circuit;
use crate::qstate::DensityMatrix;

/// Shots drawn from one RNG stream. Chunk `k` uses stream `k` of the
/// generator seeded with `seed`, so results do not depend on thread count.
pub const SHOT_CHUNK: usize = 1 << 16;

impl AncillaDistribution {
    /// `shots` outcome indices drawn i.i.d. from the distribution.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<usize> {
        // clamp round-off negatives from the density engine
        let weights: Vec<f64> = self.probs().iter().map(|p| p.max(0.0)).collect();
        let dist = WeightedIndex::new(&weights).expect("distribution has positive mass");
        let chunks = shots.div_ceil(SHOT_CHUNK);
        (0..chunks)
            .into_par_iter()
            .flat_map_iter(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let len = SHOT_CHUNK.min(shots - k * SHOT_CHUNK);
                let dist = &dist;
                (0..len).map(move |_| dist.sample(&mut rng)).collect::<Vec<_>>()
            })
            .collect()
    }

    /// `shots` parity outcomes `(−1)^{ΣQ_i}`.
    pub fn sample_parities(&self, shots: usize, seed: u64) -> Vec<i8> {
        self.sample(shots, seed).into_iter().map(|b| if b.count_ones() % 2 == 0 { 1 } else { -1 }).collect()
    }
}

/// Seeded ancilla bit strings, drawn from the exact outcome distribution.
pub fn sample_bitstrings(
    circuit: &Circuit,
    inputs: &[DensityMatrix],
    noise: &NoiseModel,
    spec: &MeasurementSpec,
    shots: usize,
    seed: u64,
) -> Result<Vec<usize>, SimError> {
    Ok(bitstring_distribution(circuit, inputs, noise, spec)?.sample(shots, seed))
}

/// Seeded parity outcomes in `{+1, −1}`.
pub fn sample_shots(
    circuit: &Circuit,
    inputs: &[DensityMatrix],
    noise: &NoiseModel,
    spec: &MeasurementSpec,
    shots: usize,
    seed: u64,
) -> Result<Vec<i8>, SimError> {
    Ok(bitstring_distribution(circuit, inputs, noise, spec)?.sample_parities(shots, seed))
}
