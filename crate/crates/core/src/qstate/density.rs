use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{qubits_for_dim, CMatrix, PauliObservable, StateError, StateVector, EXACT_TOL};

/// A validated `n`-qubit mixed state.
///
/// Construction goes through [`make_density`], which checks Hermiticity,
/// unit trace and positive semidefiniteness. The stored matrix is the
/// Hermitian part of the input, so tiny asymmetries do not leak into later
/// arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "super::DensityDoc", into = "super::DensityDoc")]
pub struct DensityMatrix {
    n: usize,
    data: CMatrix,
}

/// Eigen-ensemble of a density matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<DVector<Complex64>>,
}

/// Validate `matrix` as a density matrix.
pub fn make_density(matrix: CMatrix) -> Result<DensityMatrix, StateError> {
    let (rows, cols) = matrix.shape();
    let n = match qubits_for_dim(rows) {
        Some(n) if rows == cols => n,
        _ => return Err(StateError::BadDimension { rows, cols }),
    };

    let adjoint = matrix.adjoint();
    let deviation = matrix
        .iter()
        .zip(adjoint.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if deviation > EXACT_TOL {
        return Err(StateError::NotHermitian { deviation });
    }
    let data = (&matrix + &adjoint).scale(0.5);

    let tr = data.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > EXACT_TOL {
        return Err(StateError::NotUnitTrace { re: tr.re, im: tr.im });
    }

    let eig = SymmetricEigen::try_new(data.clone(), 1e-15, 10_000).ok_or(StateError::EigenFailure)?;
    let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -EXACT_TOL {
        return Err(StateError::NotPsd { min_eigenvalue });
    }

    Ok(DensityMatrix { n, data })
}

/// Spectral decomposition with eigenvalues sorted descending.
///
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero and the spectrum is
/// renormalized to sum to one.
pub fn spectral(rho: &DensityMatrix) -> Result<SpectralDecomposition, StateError> {
    let eig = SymmetricEigen::try_new(rho.data.clone(), 1e-15, 10_000).ok_or(StateError::EigenFailure)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    for e in &mut eigenvalues {
        *e /= total;
    }
    let eigenvectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();

    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

impl SpectralDecomposition {
    /// `Σ E_k |u_k⟩⟨u_k|`.
    pub fn reconstruct(&self) -> CMatrix {
        let dim = self.eigenvectors.first().map_or(0, |v| v.len());
        let mut out = CMatrix::zeros(dim, dim);
        for (e, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            out += (v * v.adjoint()).scale(*e);
        }
        out
    }

    /// Pure components with weight above `cutoff`, as state vectors.
    pub fn ensemble(&self, cutoff: f64) -> Vec<(f64, StateVector)> {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .filter(|(e, _)| **e > cutoff)
            .map(|(e, v)| {
                let norm = v.norm();
                let amps = v.iter().map(|a| a / norm).collect();
                (*e, StateVector::from_normalized_unchecked(amps))
            })
            .collect()
    }
}

impl DensityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        let data = CMatrix::identity(dim, dim).scale(1.0 / dim as f64);
        DensityMatrix { n, data }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &StateVector) -> Self {
        let v = DVector::from_column_slice(psi.amplitudes());
        DensityMatrix { n: psi.n(), data: &v * v.adjoint() }
    }

    /// Computational basis projector `|index⟩⟨index|`.
    pub fn basis(n: usize, index: usize) -> Self {
        Self::from_pure(&StateVector::basis(n, index))
    }

    /// Convex combination of two states of the same size, used by noise channels.
    pub(crate) fn mix_with_identity(&self, gamma: f64) -> Self {
        let dim = self.dim();
        let mut data = self.data.scale(1.0 - gamma);
        let shift = Complex64::new(gamma / dim as f64, 0.0);
        for i in 0..dim {
            data[(i, i)] += shift;
        }
        DensityMatrix { n: self.n, data }
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.data * &self.data).trace().re
    }

    /// `Re Tr(O ρ)`.
    pub fn expectation(&self, observable: &PauliObservable) -> f64 {
        (observable.matrix() * &self.data).trace().re
    }
}
