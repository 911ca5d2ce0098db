//! Brute-force ground truth by dense matrix arithmetic.
//!
//! Nothing here uses the spectral decomposition or the circuit code, so the
//! oracle stays independent of what it checks. Matrix powers are repeated
//! products and dominant eigenvectors come from power iteration.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::qstate::{CMatrix, DensityMatrix, PauliObservable};

/// Largest `m·n` for which the permutation path is evaluated.
pub const MAX_PERMUTATION_QUBITS: usize = 12;
/// Agreement required between the product and permutation paths.
pub const PATH_TOL: f64 = 1e-10;

const POWER_TOL: f64 = 1e-13;
const POWER_MAX_ITER: usize = 200_000;
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("no states given")]
    Empty,
    #[error("state {index} has {found} qubits, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("observable acts on {found} qubits, state has {expected}")]
    ObservableMismatch { expected: usize, found: usize },
    #[error("m·n = {qubits} exceeds the permutation-path limit of {limit}")]
    TooLarge { qubits: usize, limit: usize },
    #[error("m must be at least 1")]
    ZeroCopies,
    #[error("product and permutation paths disagree by {deviation:e}")]
    PathMismatch { deviation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    /// `Tr(ρ^m)` as a multivariate trace of `m` equal copies.
    pub mt: Complex64,
    pub tr_o_rho_m: f64,
    pub vd: f64,
}

fn common_qubits(states: &[DensityMatrix]) -> Result<usize, OracleError> {
    let n = states.first().ok_or(OracleError::Empty)?.n();
    match states.iter().position(|r| r.n() != n) {
        Some(index) => Err(OracleError::DimensionMismatch { index, expected: n, found: states[index].n() }),
        None => Ok(n),
    }
}

/// `Tr(ρ₁ρ₂⋯ρ_m)` from the ordered matrix product.
pub fn mt_exact(states: &[DensityMatrix]) -> Result<Complex64, OracleError> {
    common_qubits(states)?;
    let mut prod = states[0].matrix().clone();
    for rho in &states[1..] {
        prod *= rho.matrix();
    }
    Ok(prod.trace())
}

/// [`mt_exact`], cross-checked against [`mt_via_permutation`] when
/// `m·n ≤ 12`.
pub fn mt_checked(states: &[DensityMatrix]) -> Result<Complex64, OracleError> {
    let product = mt_exact(states)?;
    if states.len() * states[0].n() <= MAX_PERMUTATION_QUBITS {
        let via = mt_via_permutation(states)?;
        let deviation = (via - product).norm();
        if deviation > PATH_TOL {
            return Err(OracleError::PathMismatch { deviation });
        }
    }
    Ok(product)
}

/// Basis-state action of the cyclic shift on `m` registers of `n` qubits:
/// `S|y₁…y_m⟩ = |y_m y₁…y_{m−1}⟩`, register 1 most significant. Entry `y`
/// holds the image index.
pub fn shift_permutation(m: usize, n: usize) -> Vec<usize> {
    let d = 1usize << n;
    let total = 1usize << (m * n);
    (0..total)
        .map(|y| {
            // the last register moves to the front
            let last = y % d;
            (y >> n) | (last << ((m - 1) * n))
        })
        .collect()
}

/// Dense permutation matrix of the cyclic shift.
pub fn shift_matrix(m: usize, n: usize) -> Result<CMatrix, OracleError> {
    if m * n > MAX_PERMUTATION_QUBITS {
        return Err(OracleError::TooLarge { qubits: m * n, limit: MAX_PERMUTATION_QUBITS });
    }
    let perm = shift_permutation(m, n);
    let mut s = CMatrix::zeros(perm.len(), perm.len());
    for (y, &image) in perm.iter().enumerate() {
        s[(image, y)] = Complex64::new(1.0, 0.0);
    }
    Ok(s)
}

/// `Tr[S (ρ₁ ⊗ ⋯ ⊗ ρ_m)]` summed entry by entry over the permutation.
///
/// With the shift above this equals `Tr(ρ_m⋯ρ₁)`, the complex conjugate of
/// the multivariate trace.
pub fn shift_trace(states: &[DensityMatrix]) -> Result<Complex64, OracleError> {
    let n = common_qubits(states)?;
    let m = states.len();
    if m * n > MAX_PERMUTATION_QUBITS {
        return Err(OracleError::TooLarge { qubits: m * n, limit: MAX_PERMUTATION_QUBITS });
    }
    let d = 1usize << n;
    let digit = |y: usize, i: usize| (y >> ((m - 1 - i) * n)) & (d - 1);
    let perm = shift_permutation(m, n);
    // with S|x⟩ = |σ(x)⟩, Tr(S A) = Σ_x A[x, σ(x)]
    let mut total = Complex64::new(0.0, 0.0);
    for (x, &sx) in perm.iter().enumerate() {
        let mut term = Complex64::new(1.0, 0.0);
        for (i, rho) in states.iter().enumerate() {
            term *= rho.matrix()[(digit(x, i), digit(sx, i))];
            if term == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        total += term;
    }
    Ok(total)
}

/// `Tr(ρ₁⋯ρ_m)` through the permutation path.
pub fn mt_via_permutation(states: &[DensityMatrix]) -> Result<Complex64, OracleError> {
    Ok(shift_trace(states)?.conj())
}

fn matrix_power(a: &CMatrix, m: usize) -> CMatrix {
    let mut out = a.clone();
    for _ in 1..m {
        out *= a;
    }
    out
}

fn check_observable(rho: &DensityMatrix, o: &PauliObservable) -> Result<(), OracleError> {
    if o.n() != rho.n() {
        return Err(OracleError::ObservableMismatch { expected: rho.n(), found: o.n() });
    }
    Ok(())
}

/// `Tr(ρ^m)`, `Tr(Oρ^m)` and their ratio.
pub fn oracle(rho: &DensityMatrix, m: usize, o: &PauliObservable) -> Result<OracleResult, OracleError> {
    if m == 0 {
        return Err(OracleError::ZeroCopies);
    }
    check_observable(rho, o)?;
    let power = matrix_power(rho.matrix(), m);
    let mt = power.trace();
    let tr_o_rho_m = (o.matrix() * &power).trace().re;
    Ok(OracleResult { mt, tr_o_rho_m, vd: tr_o_rho_m / mt.re })
}

/// `Tr(Oρ^m) / Tr(ρ^m)`.
pub fn vd_exact(rho: &DensityMatrix, m: usize, o: &PauliObservable) -> Result<f64, OracleError> {
    Ok(oracle(rho, m, o)?.vd)
}

/// Top eigenpair of a Hermitian PSD matrix by power iteration.
fn dominant_eigenpair(a: &CMatrix) -> (f64, nalgebra::DVector<Complex64>) {
    let dim = a.nrows();
    // fixed generic start vector, not orthogonal to any eigenvector in practice
    let mut v = nalgebra::DVector::from_fn(dim, |i, _| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * (i * i) as f64));
    v /= Complex64::new(v.norm(), 0.0);
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = a * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return (0.0, v);
        }
        v = w / Complex64::new(norm, 0.0);
        let av = a * &v;
        lambda = v.dotc(&av).re;
        let residual = (av - &v * Complex64::new(lambda, 0.0)).norm();
        if residual < POWER_TOL {
            break;
        }
    }
    (lambda, v)
}

/// Error of `⟨O⟩_vd^(m)` against the dominant-eigenspace expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuppressionCurve {
    /// `(m, |⟨O⟩_vd^(m) − ⟨O⟩_dominant|)`.
    pub points: Vec<(usize, f64)>,
    /// `Tr(OΠ)/rank Π` for the top eigenspace projector `Π`.
    pub dominant_expectation: f64,
    /// `E₁/E₀`, the expected asymptotic error ratio.
    pub eigenvalue_ratio: f64,
    /// The top eigenvalue is degenerate; the ratio is then 1 and the
    /// dominant expectation is the eigenspace average.
    pub degenerate: bool,
}

impl SuppressionCurve {
    /// `err(m+1)/err(m)` for consecutive points with nonzero error.
    pub fn error_ratios(&self) -> Vec<(usize, f64)> {
        self.points
            .windows(2)
            .filter(|w| w[0].1 > 0.0)
            .map(|w| (w[1].0, w[1].1 / w[0].1))
            .collect()
    }
}

pub fn exponential_suppression_curve(
    rho: &DensityMatrix,
    m_range: impl IntoIterator<Item = usize>,
    o: &PauliObservable,
) -> Result<SuppressionCurve, OracleError> {
    check_observable(rho, o)?;
    let (e0, v0) = dominant_eigenpair(rho.matrix());
    let mut top = vec![v0];
    let mut rest = rho.matrix().clone();
    let mut e1 = 0.0;
    loop {
        let v = top.last().expect("nonempty");
        let e = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        rest -= v * v.adjoint() * Complex64::new(e, 0.0);
        if top.len() == rho.dim() {
            break;
        }
        let (e_next, v_next) = dominant_eigenpair(&rest);
        if (e0 - e_next).abs() > DEGENERACY_TOL {
            e1 = e_next;
            break;
        }
        top.push(v_next);
    }
    let om = o.matrix();
    let dominant_expectation =
        top.iter().map(|v| (v.adjoint() * &om * v)[(0, 0)].re).sum::<f64>() / top.len() as f64;
    let points = m_range
        .into_iter()
        .map(|m| Ok((m, (vd_exact(rho, m, o)? - dominant_expectation).abs())))
        .collect::<Result<Vec<_>, OracleError>>()?;
    Ok(SuppressionCurve {
        points,
        dominant_expectation,
        eigenvalue_ratio: if top.len() > 1 { 1.0 } else { e1 / e0 },
        degenerate: top.len() > 1,
    })
}
