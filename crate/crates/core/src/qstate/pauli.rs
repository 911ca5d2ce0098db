use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{kron_all, CMatrix, StateError};

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Result<Self, StateError> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(StateError::BadPauliLetter(other)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix(self) -> CMatrix {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        CMatrix::from_row_slice(2, 2, &entries)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Tensor product `σ_1 ⊗ … ⊗ σ_n`, letter 0 acting on qubit 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString { letters }
    }

    pub fn identity(n: usize) -> Self {
        PauliString { letters: vec![Pauli::I; n] }
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn matrix(&self) -> CMatrix {
        pauli_matrix(self)
    }
}

impl FromStr for PauliString {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s.trim().chars().map(Pauli::from_char).collect::<Result<_, _>>()?;
        Ok(PauliString { letters })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Dense `2^n × 2^n` matrix of a Pauli string, qubit 0 most significant.
pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let factors: Vec<CMatrix> = p.letters.iter().map(|l| l.matrix()).collect();
    kron_all(&factors)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub string: PauliString,
}

/// Real linear combination `O = Σ a_k P_k` of Pauli strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "super::ObservableDoc", into = "super::ObservableDoc")]
pub struct PauliObservable {
    n: usize,
    terms: Vec<PauliTerm>,
}

impl PauliObservable {
    pub fn new(n: usize, terms: Vec<PauliTerm>) -> Result<Self, StateError> {
        if let Some(bad) = terms.iter().find(|t| t.string.n() != n) {
            return Err(StateError::QubitMismatch { expected: n, found: bad.string.n() });
        }
        Ok(PauliObservable { n, terms })
    }

    /// Parse `[(coeff, "XZ"), …]`.
    pub fn from_pairs(n: usize, pairs: &[(f64, &str)]) -> Result<Self, StateError> {
        let terms = pairs
            .iter()
            .map(|(a, s)| Ok(PauliTerm { coeff: *a, string: s.parse()? }))
            .collect::<Result<Vec<_>, StateError>>()?;
        Self::new(n, terms)
    }

    /// The identity observable on `n` qubits.
    pub fn identity(n: usize) -> Self {
        PauliObservable { n, terms: vec![PauliTerm { coeff: 1.0, string: PauliString::identity(n) }] }
    }

    /// Mean of single-qubit `σ_z` over all qubits, `(Σ_q Z_q) / n`.
    pub fn mean_z(n: usize) -> Self {
        let terms = (0..n)
            .map(|q| {
                let mut letters = vec![Pauli::I; n];
                letters[q] = Pauli::Z;
                PauliTerm { coeff: 1.0 / n as f64, string: PauliString::new(letters) }
            })
            .collect();
        PauliObservable { n, terms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// `N_o`.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `c = Σ |a_k|`.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm { coeff: t.coeff * lambda, string: t.string.clone() })
            .collect();
        PauliObservable { n: self.n, terms }
    }

    /// Dense `Σ a_k P_k`.
    pub fn matrix(&self) -> CMatrix {
        let dim = 1usize << self.n;
        let mut out = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            out += pauli_matrix(&t.string).scale(t.coeff);
        }
        out
    }
}
