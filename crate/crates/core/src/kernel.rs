//! In-place gate application on dense amplitude buffers.
//!
//! A buffer of length `2^total` holds `total` qubits, qubit 0 most
//! significant. `offset` shifts the gate's operand indices, and `conjugate`
//! applies the complex-conjugated gate. A `w`-qubit density matrix stored
//! row-major is a `2w`-qubit buffer; `U ρ U†` is the gate on the row qubits
//! (offset 0) followed by the conjugated gate on the column qubits (offset
//! `w`).

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::circuit::{Gate, GateKind};
use crate::qstate::Pauli;

#[inline]
fn mask(total: usize, q: usize) -> usize {
    1 << (total - 1 - q)
}

pub(crate) fn apply_gate(state: &mut [Complex64], total: usize, gate: &Gate, offset: usize, conjugate: bool) {
    let qs: Vec<usize> = gate.qubits.iter().map(|q| q + offset).collect();
    let i_unit = if conjugate { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) };
    match gate.kind {
        GateKind::H => {
            let t = mask(total, qs[0]);
            for i in (0..state.len()).filter(|i| i & t == 0) {
                let (a, b) = (state[i], state[i | t]);
                state[i] = (a + b) * FRAC_1_SQRT_2;
                state[i | t] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        GateKind::Ry(theta) => {
            let t = mask(total, qs[0]);
            let (s, c) = (theta / 2.0).sin_cos();
            for i in (0..state.len()).filter(|i| i & t == 0) {
                let (a, b) = (state[i], state[i | t]);
                state[i] = a * c - b * s;
                state[i | t] = a * s + b * c;
            }
        }
        GateKind::SPhase => {
            let t = mask(total, qs[0]);
            for (i, amp) in state.iter_mut().enumerate() {
                if i & t != 0 {
                    *amp *= i_unit;
                }
            }
        }
        GateKind::Cnot | GateKind::CPauli(Pauli::X) => {
            let (c, t) = (mask(total, qs[0]), mask(total, qs[1]));
            for i in 0..state.len() {
                if i & c != 0 && i & t == 0 {
                    state.swap(i, i | t);
                }
            }
        }
        GateKind::CPauli(Pauli::Y) => {
            let (c, t) = (mask(total, qs[0]), mask(total, qs[1]));
            for i in 0..state.len() {
                if i & c != 0 && i & t == 0 {
                    let (a0, a1) = (state[i], state[i | t]);
                    state[i] = -i_unit * a1;
                    state[i | t] = i_unit * a0;
                }
            }
        }
        GateKind::CPauli(Pauli::Z) => {
            let ct = mask(total, qs[0]) | mask(total, qs[1]);
            for (i, amp) in state.iter_mut().enumerate() {
                if i & ct == ct {
                    *amp = -*amp;
                }
            }
        }
        GateKind::CPauli(Pauli::I) => {}
        GateKind::Cswap => {
            let c = mask(total, qs[0]);
            let (a, b) = (mask(total, qs[1]), mask(total, qs[2]));
            for i in 0..state.len() {
                if i & c != 0 && i & a != 0 && i & b == 0 {
                    state.swap(i, i ^ a ^ b);
                }
            }
        }
    }
}

/// `U ρ U†` for a row-major `2^width × 2^width` density buffer.
pub(crate) fn conjugate_density(rho: &mut [Complex64], width: usize, gate: &Gate) {
    apply_gate(rho, 2 * width, gate, 0, false);
    apply_gate(rho, 2 * width, gate, width, true);
}
