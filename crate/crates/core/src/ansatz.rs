//! Two-qubit hardware-efficient ansatz used by the distillation experiment.
//!
//! `U(α) = CNOT·(R_y(α₃)⊗R_y(α₄))·CNOT·(R_y(α₁)⊗R_y(α₂))` acting on `|00⟩`,
//! CNOT controlled by qubit 1, `R_y(θ) = exp(−iθσ_y/2)`.

use num_complex::Complex64;

use crate::circuit::{Gate, GateKind};
use crate::kernel::apply_gate;
use crate::qstate::{DensityMatrix, StateVector};
use crate::simulator::{depolarize_state, SimError};

/// Reference parameters of the experiment.
pub const REFERENCE_ALPHA: [f64; 4] = [0.8147, 0.1270, 0.2785, 0.5469];

/// `U(α)|00⟩`.
pub fn ansatz_vector(alpha: [f64; 4]) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 4];
    amps[0] = Complex64::new(1.0, 0.0);
    let gates = [
        Gate { kind: GateKind::Ry(alpha[0]), qubits: vec![0] },
        Gate { kind: GateKind::Ry(alpha[1]), qubits: vec![1] },
        Gate { kind: GateKind::Cnot, qubits: vec![0, 1] },
        Gate { kind: GateKind::Ry(alpha[2]), qubits: vec![0] },
        Gate { kind: GateKind::Ry(alpha[3]), qubits: vec![1] },
        Gate { kind: GateKind::Cnot, qubits: vec![0, 1] },
    ];
    for g in &gates {
        apply_gate(&mut amps, 2, g, 0, false);
    }
    StateVector::from_normalized_unchecked(amps)
}

/// `(1−γ₀)·U(α)|00⟩⟨00|U(α)† + γ₀·I/4`.
pub fn ansatz_state(alpha: [f64; 4], gamma0: f64) -> Result<DensityMatrix, SimError> {
    depolarize_state(&DensityMatrix::from_pure(&ansatz_vector(alpha)), gamma0)
}
