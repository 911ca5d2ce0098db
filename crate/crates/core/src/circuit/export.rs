//! Text and QASM-like emission.
//!
//! Text grammar (one header line, then one line per layer):
//!
//! ```text
//! UMT-CIRCUIT width=<w> m=<m> n=<n> s=<s> prop=<1|2> policy=<greedy|layer-restricted>
//! LAYER <k>: <gate> | <gate> | ...
//! ```
//!
//! Operands are `a<k>` for the `k`-th ancilla and `(i,q)` for qubit `q` of
//! register `i`, all 1-based. Gates:
//!
//! ```text
//! H <op>            S <op>            RY(<angle>) <op>
//! CNOT <op>;<op>    CX|CY|CZ <op>;<op>
//! CSWAP <op>;<op><-><op>
//! ```
//!
//! The layer role is recovered from its gates: `H`/`CNOT`/`RY` layers are GHZ
//! preparation, `CSWAP` layers are swap sub-layers, controlled Paulis form the
//! observable layer and `S` the phase layer.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{Circuit, CircuitError, CircuitMeta, Gate, GateKind, Layer, LayerKind, Proposition};
use crate::qstate::Pauli;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Text,
    Qasm,
}

impl FromStr for ExportFormat {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(ExportFormat::Text),
            "qasm" | "qasm-like" => Ok(ExportFormat::Qasm),
            other => Err(CircuitError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn export_circuit(circuit: &Circuit, format: ExportFormat) -> String {
    match format {
        ExportFormat::Text => export_text(circuit),
        ExportFormat::Qasm => export_qasm(circuit),
    }
}

fn operand(circuit: &Circuit, q: usize) -> String {
    let a = circuit.ancillas().len();
    if q < a {
        format!("a{}", q + 1)
    } else {
        let n = circuit.meta().n;
        format!("({},{})", (q - a) / n + 1, (q - a) % n + 1)
    }
}

fn gate_text(circuit: &Circuit, g: &Gate) -> String {
    let op = |k: usize| operand(circuit, g.qubits[k]);
    match g.kind {
        GateKind::H => format!("H {}", op(0)),
        GateKind::SPhase => format!("S {}", op(0)),
        GateKind::Ry(theta) => format!("RY({theta:?}) {}", op(0)),
        GateKind::Cnot => format!("CNOT {};{}", op(0), op(1)),
        GateKind::CPauli(p) => format!("C{} {};{}", p.to_char(), op(0), op(1)),
        GateKind::Cswap => format!("CSWAP {};{}<->{}", op(0), op(1), op(2)),
    }
}

fn header(circuit: &Circuit) -> String {
    let meta = circuit.meta();
    format!(
        "UMT-CIRCUIT width={} m={} n={} s={} prop={} policy={}",
        circuit.width(),
        meta.m,
        meta.n,
        meta.s,
        meta.proposition,
        meta.policy
    )
}

fn export_text(circuit: &Circuit) -> String {
    let mut out = header(circuit);
    out.push('\n');
    for (k, layer) in circuit.layers().iter().enumerate() {
        let gates: Vec<String> = layer.gates.iter().map(|g| gate_text(circuit, g)).collect();
        let _ = writeln!(out, "LAYER {}: {}", k + 1, gates.join(" | "));
    }
    out
}

fn export_qasm(circuit: &Circuit) -> String {
    let meta = circuit.meta();
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(
        out,
        "// umt m={} n={} s={} prop={} policy={}",
        meta.m, meta.n, meta.s, meta.proposition, meta.policy
    );
    let _ = writeln!(out, "qreg q[{}];", circuit.width());
    let _ = writeln!(out, "creg c[{}];", circuit.ancillas().len());
    for layer in circuit.layers() {
        for g in &layer.gates {
            let q = &g.qubits;
            let line = match g.kind {
                GateKind::H => format!("h q[{}];", q[0]),
                GateKind::SPhase => format!("s q[{}];", q[0]),
                GateKind::Ry(theta) => format!("ry({theta:?}) q[{}];", q[0]),
                GateKind::Cnot => format!("cx q[{}],q[{}];", q[0], q[1]),
                GateKind::CPauli(p) => {
                    format!("c{} q[{}],q[{}];", p.to_char().to_ascii_lowercase(), q[0], q[1])
                }
                GateKind::Cswap => format!("cswap q[{}],q[{}],q[{}];", q[0], q[1], q[2]),
            };
            out.push_str(&line);
            out.push('\n');
        }
    }
    if !circuit.ancillas().is_empty() {
        out.push_str("barrier q;\n");
    }
    // σ_x readout of every ancilla
    for (k, &a) in circuit.ancillas().iter().enumerate() {
        let _ = writeln!(out, "h q[{a}];");
        let _ = writeln!(out, "measure q[{a}] -> c[{k}];");
    }
    out
}

fn perr(line: usize, message: impl Into<String>) -> CircuitError {
    CircuitError::Parse { line, message: message.into() }
}

fn parse_header(line: &str) -> Result<(usize, CircuitMeta), CircuitError> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("UMT-CIRCUIT") {
        return Err(perr(1, "missing UMT-CIRCUIT header"));
    }
    let (mut width, mut m, mut n, mut s, mut prop, mut policy) = (None, None, None, None, None, None);
    for tok in tokens {
        let (key, value) = tok.split_once('=').ok_or_else(|| perr(1, format!("malformed field {tok:?}")))?;
        let num = || value.parse::<usize>().map_err(|_| perr(1, format!("bad value for {key}: {value:?}")));
        match key {
            "width" => width = Some(num()?),
            "m" => m = Some(num()?),
            "n" => n = Some(num()?),
            "s" => s = Some(num()?),
            "prop" => prop = Some(value.parse::<Proposition>()?),
            "policy" => policy = Some(value.parse().map_err(|e: crate::schedule::ScheduleError| perr(1, e.to_string()))?),
            other => return Err(perr(1, format!("unknown field {other:?}"))),
        }
    }
    let missing = |name: &str| perr(1, format!("missing field {name}"));
    let meta = CircuitMeta {
        m: m.ok_or_else(|| missing("m"))?,
        n: n.ok_or_else(|| missing("n"))?,
        s: s.ok_or_else(|| missing("s"))?,
        proposition: prop.ok_or_else(|| missing("prop"))?,
        policy: policy.ok_or_else(|| missing("policy"))?,
    };
    Ok((width.ok_or_else(|| missing("width"))?, meta))
}

fn parse_operand(circuit: &Circuit, text: &str, line: usize) -> Result<usize, CircuitError> {
    let text = text.trim();
    if let Some(k) = text.strip_prefix('a') {
        let k: usize = k.parse().map_err(|_| perr(line, format!("bad ancilla operand {text:?}")))?;
        if k == 0 || k > circuit.ancillas().len() {
            return Err(perr(line, format!("ancilla {text} out of range")));
        }
        return Ok(circuit.ancillas()[k - 1]);
    }
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| perr(line, format!("bad operand {text:?}")))?;
    let (r, q) = inner.split_once(',').ok_or_else(|| perr(line, format!("bad operand {text:?}")))?;
    let r: usize = r.trim().parse().map_err(|_| perr(line, format!("bad register in {text:?}")))?;
    let q: usize = q.trim().parse().map_err(|_| perr(line, format!("bad position in {text:?}")))?;
    let n = circuit.meta().n;
    if r == 0 || r > circuit.registers().len() || q == 0 || q > n {
        return Err(perr(line, format!("operand {text} out of range")));
    }
    Ok(circuit.registers()[r - 1].start + q - 1)
}

fn parse_gate(circuit: &Circuit, text: &str, line: usize) -> Result<Gate, CircuitError> {
    let (name, args) = text.trim().split_once(' ').ok_or_else(|| perr(line, format!("bad gate {text:?}")))?;
    let op = |t: &str| parse_operand(circuit, t, line);
    let pair = |args: &str| -> Result<(usize, usize), CircuitError> {
        let (a, b) = args.split_once(';').ok_or_else(|| perr(line, format!("expected control;target in {args:?}")))?;
        Ok((op(a)?, op(b)?))
    };
    let (kind, qubits) = match name {
        "H" => (GateKind::H, vec![op(args)?]),
        "S" => (GateKind::SPhase, vec![op(args)?]),
        "CNOT" => {
            let (c, t) = pair(args)?;
            (GateKind::Cnot, vec![c, t])
        }
        "CX" | "CY" | "CZ" => {
            let (c, t) = pair(args)?;
            let letter = Pauli::from_char(name.as_bytes()[1] as char).expect("X, Y or Z");
            (GateKind::CPauli(letter), vec![c, t])
        }
        "CSWAP" => {
            let (c, rest) = args.split_once(';').ok_or_else(|| perr(line, "CSWAP needs control;a<->b"))?;
            let (a, b) = rest.split_once("<->").ok_or_else(|| perr(line, "CSWAP needs control;a<->b"))?;
            (GateKind::Cswap, vec![op(c)?, op(a)?, op(b)?])
        }
        _ => {
            let angle = name
                .strip_prefix("RY(")
                .and_then(|t| t.strip_suffix(')'))
                .and_then(|t| t.parse::<f64>().ok())
                .ok_or_else(|| perr(line, format!("unknown gate {name:?}")))?;
            (GateKind::Ry(angle), vec![op(args)?])
        }
    };
    Gate::new(kind, qubits).map_err(|e| perr(line, e.to_string()))
}

/// Parse the text format produced by [`export_circuit`].
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let (width, meta) = parse_header(head)?;
    let mut circuit = Circuit::skeleton(meta)?;
    if circuit.width() != width {
        return Err(perr(1, format!("width {width} does not match layout width {}", circuit.width())));
    }

    let mut swap_layers = 0usize;
    for (idx, raw) in lines {
        let line = idx + 1;
        let rest = raw.strip_prefix("LAYER ").ok_or_else(|| perr(line, "expected LAYER"))?;
        let (number, body) = rest.split_once(':').ok_or_else(|| perr(line, "expected ':'"))?;
        let expected = circuit.layers().len() + 1;
        if number.trim().parse::<usize>().ok() != Some(expected) {
            return Err(perr(line, format!("expected layer number {expected}")));
        }
        let gates = body
            .split('|')
            .map(|g| parse_gate(&circuit, g, line))
            .collect::<Result<Vec<_>, _>>()?;
        let kind = match gates.first().map(|g| g.kind) {
            Some(GateKind::Cswap) => {
                let round = match meta.proposition {
                    Proposition::Sequential => swap_layers / meta.n,
                    Proposition::Parallel => swap_layers,
                };
                swap_layers += 1;
                LayerKind::Swap { round }
            }
            Some(GateKind::CPauli(_)) => LayerKind::Observable,
            Some(GateKind::SPhase) => LayerKind::Phase,
            _ => LayerKind::GhzPrep,
        };
        circuit.push_layer(Layer { kind, gates }).map_err(|e| perr(line, e.to_string()))?;
    }
    Ok(circuit)
}
