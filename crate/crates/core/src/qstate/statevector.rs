use num_complex::Complex64;

use super::{qubits_for_dim, StateError, EXACT_TOL};

/// Normalized pure state on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Validate an amplitude vector of unit norm.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let n = qubits_for_dim(amplitudes.len()).ok_or(StateError::BadLength { len: amplitudes.len() })?;
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > EXACT_TOL {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(StateVector { n, amplitudes })
    }

    /// Rescale an arbitrary nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let n = qubits_for_dim(amplitudes.len()).ok_or(StateError::BadLength { len: amplitudes.len() })?;
        let norm = norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::NotNormalized { norm });
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(StateVector { n, amplitudes })
    }

    pub(crate) fn from_normalized_unchecked(amplitudes: Vec<Complex64>) -> Self {
        let n = amplitudes.len().trailing_zeros() as usize;
        StateVector { n, amplitudes }
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        StateVector { n, amplitudes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Mutable access for in-place unitary kernels, which preserve the norm.
    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        StateVector { n: self.n + other.n, amplitudes }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}
