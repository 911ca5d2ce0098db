#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use umt_core::qstate::{make_density, DensityMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `GG†/Tr(GG†)` for a `2^n × rank` Ginibre matrix `G`.
pub fn random_density(n: usize, rank: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let dim = 1 << n;
    let g = DMatrix::from_fn(dim, rank, |_, _| gaussian(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    make_density(rho / tr).expect("Ginibre state is valid")
}

pub fn random_full_rank(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    random_density(n, 1 << n, rng)
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
