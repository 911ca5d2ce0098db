//! Dense numeric foundation: density matrices, pure state vectors, Pauli
//! strings and observables.
//!
//! Qubit 0 is always the most significant tensor factor, so for an `n`-qubit
//! basis index `x` the value of qubit `q` is bit `n - 1 - q` of `x`.

mod density;
mod pauli;
mod serial;
mod statevector;

pub use density::{make_density, spectral, DensityMatrix, SpectralDecomposition};
pub use pauli::{pauli_matrix, Pauli, PauliObservable, PauliString, PauliTerm};
pub use serial::{DensityDoc, ObservableDoc, PauliTermDoc};
pub use statevector::StateVector;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix used everywhere in the crate.
pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for checks that should hold in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-10;
/// Tolerance for quantities that went through an eigensolver.
pub const EIGEN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("matrix of shape {rows}x{cols} is not square with a power-of-two dimension")]
    BadDimension { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: max |rho - rho^dagger| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("trace is {re} + {im}i, expected 1")]
    NotUnitTrace { re: f64, im: f64 },
    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("eigen-solver did not converge")]
    EigenFailure,
    #[error("state vector has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },
    #[error("state vector length {len} is not a power of two")]
    BadLength { len: usize },
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitMismatch { expected: usize, found: usize },
    #[error("invalid Pauli letter {0:?}")]
    BadPauliLetter(char),
    #[error("schema error: {0}")]
    Schema(String),
}

/// `log2(dim)` when `dim` is a power of two of at least 2^0.
pub(crate) fn qubits_for_dim(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Kronecker product of a list of matrices, first factor most significant.
pub fn kron_all<'a, I>(factors: I) -> CMatrix
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    let mut acc = CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for f in factors {
        acc = acc.kronecker(f);
    }
    acc
}
