use num_complex::Complex64;
use rayon::prelude::*;

use super::{AncillaDistribution, SimError, MAX_DENSITY_WIDTH, MAX_ENSEMBLE_WIDTH};
use crate::circuit::{Circuit, Gate, GateKind};
use crate::kernel::{apply_gate, conjugate_density};
use crate::qstate::{spectral, DensityMatrix, StateError, StateVector};

/// Eigenvalues at or below this weight are dropped from the input ensembles.
const ENSEMBLE_CUTOFF: f64 = 1e-14;
/// Product terms handled per parallel task; the reduction order is fixed.
const TERM_CHUNK: usize = 16;

/// Pure components plus a maximally mixed remainder of weight `residual`.
///
/// Global depolarizing moves weight from the components to the remainder;
/// unitaries act on the components only, since they fix `I/2^w`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureState {
    width: usize,
    components: Vec<(f64, StateVector)>,
    residual: f64,
}

impl MixtureState {
    pub fn new(components: Vec<(f64, StateVector)>, residual: f64) -> Result<Self, StateError> {
        let width = components.first().map_or(0, |(_, v)| v.n());
        if let Some((_, v)) = components.iter().find(|(_, v)| v.n() != width) {
            return Err(StateError::QubitMismatch { expected: width, found: v.n() });
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum::<f64>() + residual;
        if residual < 0.0 || components.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(StateError::NotUnitTrace { re: total, im: 0.0 });
        }
        Ok(MixtureState { width, components, residual })
    }

    pub fn pure(psi: StateVector) -> Self {
        MixtureState { width: psi.n(), components: vec![(1.0, psi)], residual: 0.0 }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn components(&self) -> &[(f64, StateVector)] {
        &self.components
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn coherent_weight(&self) -> f64 {
        1.0 - self.residual
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        for (_, psi) in &mut self.components {
            apply_gate(psi.amplitudes_mut(), self.width, gate, 0, false);
        }
    }

    /// `(1−γ)ρ + γ I/2^w`.
    pub fn depolarize(&mut self, gamma: f64) {
        for (w, _) in &mut self.components {
            *w *= 1.0 - gamma;
        }
        self.residual = 1.0 - (1.0 - self.residual) * (1.0 - gamma);
    }

    /// Run every layer, depolarizing with `gamma` after each swap round.
    pub fn evolve(&mut self, circuit: &Circuit, gamma: f64) {
        let ends = circuit.round_ends();
        for (k, layer) in circuit.layers().iter().enumerate() {
            for gate in &layer.gates {
                self.apply_gate(gate);
            }
            if gamma > 0.0 && ends.contains(&k) {
                self.depolarize(gamma);
            }
        }
    }

    /// Distribution of the leading `ancillas` qubits in the computational basis.
    pub fn leading_distribution(&self, ancillas: usize) -> Vec<f64> {
        let buckets = 1usize << ancillas;
        let mut probs = vec![self.residual / buckets as f64; buckets];
        let shift = self.width - ancillas;
        for (w, psi) in &self.components {
            for (i, a) in psi.amplitudes().iter().enumerate() {
                probs[i >> shift] += w * a.norm_sqr();
            }
        }
        probs
    }
}

fn hadamards(circuit: &Circuit) -> Vec<Gate> {
    circuit.ancillas().iter().map(|&a| Gate { kind: GateKind::H, qubits: vec![a] }).collect()
}

fn check_width(circuit: &Circuit, limit: usize, engine: &'static str) -> Result<(), SimError> {
    if circuit.width() > limit {
        return Err(SimError::WidthLimit { width: circuit.width(), limit, engine });
    }
    Ok(())
}

/// Literal density-matrix evolution.
pub(super) fn density_distribution(circuit: &Circuit, inputs: &[DensityMatrix], gamma: f64) -> Result<AncillaDistribution, SimError> {
    check_width(circuit, MAX_DENSITY_WIDTH, "density-matrix engine")?;
    let width = circuit.width();
    let ancillas = circuit.ancillas().len();
    let dim = 1usize << width;

    // row-major |0…0⟩⟨0…0| ⊗ ρ₁ ⊗ ⋯ ⊗ ρ_m, zero outside the ancilla-zero block
    let n = circuit.meta().n;
    let work = width - ancillas;
    let work_dim = 1usize << work;
    let digit = |x: usize, i: usize| (x >> (work - (i + 1) * n)) & ((1 << n) - 1);
    let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
    rho.par_chunks_mut(dim).take(work_dim).enumerate().for_each(|(row, out)| {
        for (col, entry) in out.iter_mut().take(work_dim).enumerate() {
            let mut v = Complex64::new(1.0, 0.0);
            for (i, input) in inputs.iter().enumerate() {
                v *= input.matrix()[(digit(row, i), digit(col, i))];
            }
            *entry = v;
        }
    });

    let ends = circuit.round_ends();
    for (k, layer) in circuit.layers().iter().enumerate() {
        for gate in &layer.gates {
            conjugate_density(&mut rho, width, gate);
        }
        if gamma > 0.0 && ends.contains(&k) {
            let shift = gamma / dim as f64;
            rho.par_iter_mut().for_each(|x| *x *= 1.0 - gamma);
            for i in 0..dim {
                rho[i * dim + i] += shift;
            }
        }
    }
    for gate in hadamards(circuit) {
        conjugate_density(&mut rho, width, &gate);
    }

    let shift = width - ancillas;
    let mut probs = vec![0.0; 1 << ancillas];
    for i in 0..dim {
        probs[i >> shift] += rho[i * dim + i].re;
    }
    Ok(AncillaDistribution::new(ancillas, probs))
}

/// Spectral expansion of the inputs, one statevector run per product term.
pub(super) fn ensemble_distribution(circuit: &Circuit, inputs: &[DensityMatrix], gamma: f64) -> Result<AncillaDistribution, SimError> {
    check_width(circuit, MAX_ENSEMBLE_WIDTH, "eigen-ensemble engine")?;
    let ancillas = circuit.ancillas().len();
    let ensembles = inputs
        .iter()
        .map(|rho| Ok(spectral(rho)?.ensemble(ENSEMBLE_CUTOFF)))
        .collect::<Result<Vec<_>, StateError>>()?;
    let sizes: Vec<usize> = ensembles.iter().map(Vec::len).collect();
    let terms: usize = sizes.iter().product();
    let hs = hadamards(circuit);

    let run_term = |t: usize| -> Vec<f64> {
        let mut weight = 1.0;
        let mut psi = StateVector::basis(ancillas, 0);
        let mut rest = t;
        let mut picks = vec![0; sizes.len()];
        for (k, size) in sizes.iter().enumerate().rev() {
            picks[k] = rest % size;
            rest /= size;
        }
        for (ens, &pick) in ensembles.iter().zip(&picks) {
            let (p, v) = &ens[pick];
            weight *= p;
            psi = psi.tensor(v);
        }
        let mut state = MixtureState::pure(psi);
        state.evolve(circuit, gamma);
        for h in &hs {
            state.apply_gate(h);
        }
        let mut probs = state.leading_distribution(ancillas);
        for p in &mut probs {
            *p *= weight;
        }
        probs
    };

    let partials: Vec<Vec<f64>> = (0..terms)
        .collect::<Vec<_>>()
        .par_chunks(TERM_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; 1 << ancillas];
            for &t in chunk {
                for (a, p) in acc.iter_mut().zip(run_term(t)) {
                    *a += p;
                }
            }
            acc
        })
        .collect();
    let mut probs = vec![0.0; 1 << ancillas];
    for part in partials {
        for (a, p) in probs.iter_mut().zip(part) {
            *a += p;
        }
    }
    Ok(AncillaDistribution::new(ancillas, probs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_weights_track_depolarizing() {
        let mut s = MixtureState::pure(StateVector::basis(2, 0));
        s.depolarize(0.2);
        s.depolarize(0.5);
        assert!((s.coherent_weight() - 0.4).abs() < 1e-15);
        let probs = s.leading_distribution(1);
        assert!((probs[0] - (0.4 + 0.3)).abs() < 1e-15);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixture_validation() {
        let v = StateVector::basis(1, 0);
        assert!(MixtureState::new(vec![(0.5, v.clone())], 0.5).is_ok());
        assert!(MixtureState::new(vec![(0.5, v.clone())], 0.4).is_err());
        assert!(MixtureState::new(vec![(1.5, v)], -0.5).is_err());
    }
}
