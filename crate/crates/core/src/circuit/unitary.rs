use num_complex::Complex64;

use super::{Circuit, CircuitError};
use crate::kernel::apply_gate;
use crate::qstate::CMatrix;

/// Largest width for which a dense unitary is assembled.
pub const MAX_UNITARY_WIDTH: usize = 12;

const MAX_ACTION_WIDTH: usize = 20;

fn run_layers(circuit: &Circuit, state: &mut [Complex64]) {
    for layer in circuit.layers() {
        for gate in &layer.gates {
            apply_gate(state, circuit.width(), gate, 0, false);
        }
    }
}

/// Dense `2^width` unitary of the whole circuit (all layers, in order).
pub fn circuit_unitary(circuit: &Circuit) -> Result<CMatrix, CircuitError> {
    let width = circuit.width();
    if width > MAX_UNITARY_WIDTH {
        return Err(CircuitError::WidthTooLarge { width, limit: MAX_UNITARY_WIDTH });
    }
    let dim = 1usize << width;
    let mut u = CMatrix::zeros(dim, dim);
    let mut column = vec![Complex64::new(0.0, 0.0); dim];
    for col in 0..dim {
        column.fill(Complex64::new(0.0, 0.0));
        column[col] = Complex64::new(1.0, 0.0);
        run_layers(circuit, &mut column);
        u.column_mut(col).copy_from_slice(&column);
    }
    Ok(u)
}

/// Block `⟨a| U |a⟩` of the circuit unitary acting on the work registers,
/// with the ancillas fixed to the basis state `ancilla_value` (ancilla 0 is
/// the most significant bit).
///
/// Intended for circuits without GHZ preparation, whose ancillas only act as
/// controls; use [`Circuit::without_prep`].
pub fn controlled_action(circuit: &Circuit, ancilla_value: usize) -> Result<CMatrix, CircuitError> {
    let width = circuit.width();
    if width > MAX_ACTION_WIDTH {
        return Err(CircuitError::WidthTooLarge { width, limit: MAX_ACTION_WIDTH });
    }
    let work = circuit.work_qubits().len();
    let work_dim = 1usize << work;
    let offset = ancilla_value << work;
    let mut block = CMatrix::zeros(work_dim, work_dim);
    let mut state = vec![Complex64::new(0.0, 0.0); 1 << width];
    for col in 0..work_dim {
        state.fill(Complex64::new(0.0, 0.0));
        state[offset + col] = Complex64::new(1.0, 0.0);
        run_layers(circuit, &mut state);
        for row in 0..work_dim {
            block[(row, col)] = state[offset + row];
        }
    }
    Ok(block)
}
