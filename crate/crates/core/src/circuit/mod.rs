//! Gate-level circuits realizing the controlled cyclic shift.
//!
//! Two layouts are built from a [`TranspositionSchedule`]:
//!
//! * **sequential** (`s + m·n` qubits): `s` GHZ ancillas, each swap of a
//!   round controlled by its own ancilla, the `n` qubit-level CSWAPs of a
//!   transposition stacked in `n` sub-layers. CSWAP depth `n · rounds`.
//! * **parallel** (`(s + m)·n` qubits): `n` blocks of `s` ancillas, block `q`
//!   controlling the swaps between the `q`-th qubits of the registers.
//!   CSWAP depth `rounds`.
//!
//! Ancillas always occupy the leading qubit indices, followed by the `m`
//! work registers of `n` contiguous qubits each.

mod export;
mod unitary;

pub use export::{export_circuit, parse_circuit, ExportFormat};
pub use unitary::{circuit_unitary, controlled_action, MAX_UNITARY_WIDTH};

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{Pauli, PauliString};
use crate::schedule::{self, ScheduleError, SchedulePolicy, TranspositionSchedule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("register width n must be at least 1")]
    ZeroQubits,
    #[error("gate {kind:?} expects {expected} operands, got {found}")]
    Arity { kind: GateKind, expected: usize, found: usize },
    #[error("gate operands must be distinct")]
    RepeatedOperand,
    #[error("qubit {qubit} is outside the circuit width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("gates in one layer overlap on qubit {qubit}")]
    OverlappingLayer { qubit: usize },
    #[error("register {register} does not exist (m = {m})")]
    NoSuchRegister { register: usize, m: usize },
    #[error("Pauli string has {found} letters, registers have {expected} qubits")]
    LengthMismatch { expected: usize, found: usize },
    #[error("ancilla ordinal {ordinal} is out of range")]
    NoSuchAncilla { ordinal: usize },
    #[error("width {width} exceeds the dense-unitary limit of {limit} qubits")]
    WidthTooLarge { width: usize, limit: usize },
    #[error("unknown export format {0:?}")]
    UnknownFormat(String),
    #[error("unknown proposition {0:?}, expected 1 or 2")]
    UnknownProposition(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    Ry(f64),
    /// `|0⟩ ↦ |0⟩, |1⟩ ↦ i|1⟩`.
    SPhase,
    Cnot,
    Cswap,
    CPauli(Pauli),
}

impl GateKind {
    fn arity(&self) -> usize {
        match self {
            GateKind::H | GateKind::Ry(_) | GateKind::SPhase => 1,
            GateKind::Cnot | GateKind::CPauli(_) => 2,
            GateKind::Cswap => 3,
        }
    }
}

/// A gate and its operands, control(s) first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self, CircuitError> {
        if qubits.len() != kind.arity() {
            return Err(CircuitError::Arity { kind, expected: kind.arity(), found: qubits.len() });
        }
        for (k, q) in qubits.iter().enumerate() {
            if qubits[..k].contains(q) {
                return Err(CircuitError::RepeatedOperand);
            }
        }
        Ok(Gate { kind, qubits })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerKind {
    GhzPrep,
    /// Controlled-SWAP sub-layer belonging to schedule round `round` (0-based).
    Swap { round: usize },
    Observable,
    Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub kind: LayerKind,
    pub gates: Vec<Gate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Proposition {
    /// `s + m·n` qubits, CSWAP depth `n·h(m,s)`.
    Sequential,
    /// `(s + m)·n` qubits, CSWAP depth `h(m,s)`.
    Parallel,
}

impl Proposition {
    pub fn number(self) -> u8 {
        match self {
            Proposition::Sequential => 1,
            Proposition::Parallel => 2,
        }
    }
}

impl FromStr for Proposition {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "sequential" => Ok(Proposition::Sequential),
            "2" | "parallel" => Ok(Proposition::Parallel),
            other => Err(CircuitError::UnknownProposition(other.to_string())),
        }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitMeta {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub proposition: Proposition,
    pub policy: SchedulePolicy,
}

/// H on the first qubit followed by a CNOT chain, preparing
/// `(|0…0⟩ + |1…1⟩)/√2` on `qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzPrep {
    pub qubits: Vec<usize>,
}

impl GhzPrep {
    pub fn layers(&self) -> Vec<Layer> {
        let Some(&first) = self.qubits.first() else {
            return Vec::new();
        };
        let mut layers = vec![Layer { kind: LayerKind::GhzPrep, gates: vec![Gate { kind: GateKind::H, qubits: vec![first] }] }];
        for w in self.qubits.windows(2) {
            layers.push(Layer {
                kind: LayerKind::GhzPrep,
                gates: vec![Gate { kind: GateKind::Cnot, qubits: vec![w[0], w[1]] }],
            });
        }
        layers
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    width: usize,
    ancillas: Vec<usize>,
    registers: Vec<Range<usize>>,
    layers: Vec<Layer>,
    meta: CircuitMeta,
}

impl Circuit {
    /// Qubit layout for the given parameters, without any gates.
    pub fn skeleton(meta: CircuitMeta) -> Result<Self, CircuitError> {
        let CircuitMeta { m, n, s, proposition, .. } = meta;
        if n == 0 {
            return Err(CircuitError::ZeroQubits);
        }
        if m < 2 {
            return Err(ScheduleError::TooFewCopies { m }.into());
        }
        let max = schedule::max_ancillas(m);
        if s == 0 || s > max {
            return Err(ScheduleError::AncillaOutOfRange { s, m, max }.into());
        }
        let ancilla_count = match proposition {
            Proposition::Sequential => s,
            Proposition::Parallel => s * n,
        };
        let registers = (0..m).map(|r| ancilla_count + r * n..ancilla_count + (r + 1) * n).collect();
        Ok(Circuit {
            width: ancilla_count + m * n,
            ancillas: (0..ancilla_count).collect(),
            registers,
            layers: Vec::new(),
            meta,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ancillas(&self) -> &[usize] {
        &self.ancillas
    }

    pub fn registers(&self) -> &[Range<usize>] {
        &self.registers
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn meta(&self) -> &CircuitMeta {
        &self.meta
    }

    /// Work qubits, in register order.
    pub fn work_qubits(&self) -> Range<usize> {
        self.ancillas.len()..self.width
    }

    /// Ancilla controlling qubit position `q` in the parallel layout, or the
    /// single ancilla block in the sequential one; `ordinal` is 0-based
    /// within the block.
    pub fn block_ancilla(&self, q: usize, ordinal: usize) -> usize {
        match self.meta.proposition {
            Proposition::Sequential => self.ancillas[ordinal],
            Proposition::Parallel => self.ancillas[q * self.meta.s + ordinal],
        }
    }

    /// Append a layer after checking operand range and disjointness.
    pub fn push_layer(&mut self, layer: Layer) -> Result<(), CircuitError> {
        let mut used = vec![false; self.width];
        for gate in &layer.gates {
            Gate::new(gate.kind, gate.qubits.clone())?;
            for &q in &gate.qubits {
                if q >= self.width {
                    return Err(CircuitError::QubitOutOfRange { qubit: q, width: self.width });
                }
                if std::mem::replace(&mut used[q], true) {
                    return Err(CircuitError::OverlappingLayer { qubit: q });
                }
            }
        }
        self.layers.push(layer);
        Ok(())
    }

    /// Number of controlled-SWAP layers, the reported depth.
    pub fn cswap_depth(&self) -> usize {
        self.layers.iter().filter(|l| matches!(l.kind, LayerKind::Swap { .. })).count()
    }

    /// Number of schedule rounds present.
    pub fn round_count(&self) -> usize {
        self.layers
            .iter()
            .filter_map(|l| match l.kind {
                LayerKind::Swap { round } => Some(round + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Indices of layers that close a controlled-SWAP round; a noise channel
    /// follows each of them.
    pub fn round_ends(&self) -> Vec<usize> {
        let mut ends = Vec::new();
        for (k, layer) in self.layers.iter().enumerate() {
            if let LayerKind::Swap { round } = layer.kind {
                let next_same = matches!(
                    self.layers.get(k + 1).map(|l| l.kind),
                    Some(LayerKind::Swap { round: r }) if r == round
                );
                if !next_same {
                    ends.push(k);
                }
            }
        }
        ends
    }

    /// The circuit with its GHZ preparation layers removed.
    pub fn without_prep(&self) -> Circuit {
        let mut c = self.clone();
        c.layers.retain(|l| l.kind != LayerKind::GhzPrep);
        c
    }

    fn ghz_prep(&self) -> GhzPrep {
        GhzPrep { qubits: self.ancillas.clone() }
    }
}

fn build(meta: CircuitMeta) -> Result<Circuit, CircuitError> {
    let sched = schedule::schedule(meta.m, meta.s, meta.policy)?;
    let mut circuit = Circuit::skeleton(meta)?;
    for layer in circuit.ghz_prep().layers() {
        circuit.push_layer(layer)?;
    }
    for layer in swap_layers(&circuit, &sched) {
        circuit.push_layer(layer)?;
    }
    Ok(circuit)
}

fn swap_layers(circuit: &Circuit, sched: &TranspositionSchedule) -> Vec<Layer> {
    let n = circuit.meta.n;
    let cswap = |q: usize, ordinal: usize, i: usize, j: usize| Gate {
        kind: GateKind::Cswap,
        qubits: vec![
            circuit.block_ancilla(q, ordinal),
            circuit.registers[i - 1].start + q,
            circuit.registers[j - 1].start + q,
        ],
    };
    let mut layers = Vec::new();
    for (round, transpositions) in sched.rounds.iter().enumerate() {
        let kind = LayerKind::Swap { round };
        match circuit.meta.proposition {
            Proposition::Sequential => {
                for q in 0..n {
                    let gates = transpositions
                        .iter()
                        .enumerate()
                        .map(|(a, t)| cswap(q, a, t.i(), t.j()))
                        .collect();
                    layers.push(Layer { kind, gates });
                }
            }
            Proposition::Parallel => {
                let gates = (0..n)
                    .flat_map(|q| transpositions.iter().enumerate().map(move |(a, t)| (q, a, t)))
                    .map(|(q, a, t)| cswap(q, a, t.i(), t.j()))
                    .collect();
                layers.push(Layer { kind, gates });
            }
        }
    }
    layers
}

/// Sequential layout: `s` GHZ ancillas, CSWAP depth `n · rounds`.
pub fn build_prop1(m: usize, n: usize, s: usize, policy: SchedulePolicy) -> Result<Circuit, CircuitError> {
    build(CircuitMeta { m, n, s, proposition: Proposition::Sequential, policy })
}

/// Parallel layout: `n` ancilla blocks of size `s`, CSWAP depth `rounds`.
///
/// All `s·n` ancillas are prepared in one joint GHZ state so that the blocks
/// act as a single logical control.
pub fn build_prop2(m: usize, n: usize, s: usize, policy: SchedulePolicy) -> Result<Circuit, CircuitError> {
    build(CircuitMeta { m, n, s, proposition: Proposition::Parallel, policy })
}

pub fn build_circuit(meta: CircuitMeta) -> Result<Circuit, CircuitError> {
    build(meta)
}

/// Append controlled-Pauli gates for `p` on register `target_register`
/// (1-based), controlled by the first ancilla of the relevant block.
pub fn attach_observable(circuit: &Circuit, p: &PauliString, target_register: usize) -> Result<Circuit, CircuitError> {
    attach_observable_with_control(circuit, p, target_register, 0)
}

/// Like [`attach_observable`] with an explicit 0-based ancilla ordinal inside
/// each block.
pub fn attach_observable_with_control(
    circuit: &Circuit,
    p: &PauliString,
    target_register: usize,
    control_ordinal: usize,
) -> Result<Circuit, CircuitError> {
    let CircuitMeta { m, n, s, proposition, .. } = circuit.meta;
    if p.n() != n {
        return Err(CircuitError::LengthMismatch { expected: n, found: p.n() });
    }
    if target_register == 0 || target_register > m {
        return Err(CircuitError::NoSuchRegister { register: target_register, m });
    }
    if control_ordinal >= s {
        return Err(CircuitError::NoSuchAncilla { ordinal: control_ordinal });
    }
    let gates: Vec<Gate> = p
        .letters()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l != Pauli::I)
        .map(|(q, &l)| Gate {
            kind: GateKind::CPauli(l),
            qubits: vec![circuit.block_ancilla(q, control_ordinal), circuit.registers[target_register - 1].start + q],
        })
        .collect();

    let mut out = circuit.clone();
    match proposition {
        Proposition::Parallel if !gates.is_empty() => out.push_layer(Layer { kind: LayerKind::Observable, gates })?,
        // one shared control qubit: the gates are stacked
        _ => {
            for g in gates {
                out.push_layer(Layer { kind: LayerKind::Observable, gates: vec![g] })?;
            }
        }
    }
    Ok(out)
}

/// Append the phase gate that turns the σ_x parity readout into the
/// imaginary part.
///
/// The phase goes on the leading ancilla only. The GHZ coherence picks up
/// the product of the phases applied to its qubits, so a single `S` yields
/// the factor `i`.
pub fn imaginary_mode(circuit: &Circuit) -> Circuit {
    let mut out = circuit.clone();
    if let Some(&a) = circuit.ancillas.first() {
        out.layers.push(Layer { kind: LayerKind::Phase, gates: vec![Gate { kind: GateKind::SPhase, qubits: vec![a] }] });
    }
    out
}
