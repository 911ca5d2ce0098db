//! JSON schemas for states and observables.
//!
//! Density matrix:
//!
//! ```json
//! { "n": 1, "rows": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]] }
//! ```
//!
//! Each entry is a `[re, im]` pair; `rows[i][j]` is `ρ_ij`.
//!
//! Observable:
//!
//! ```json
//! { "n": 2, "terms": [{ "coeff": 0.5, "letters": "ZI" }, { "coeff": 0.5, "letters": "IZ" }] }
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{make_density, CMatrix, DensityMatrix, PauliObservable, PauliTerm, StateError};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityDoc {
    pub n: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliTermDoc {
    pub coeff: f64,
    pub letters: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableDoc {
    pub n: usize,
    pub terms: Vec<PauliTermDoc>,
}

impl TryFrom<DensityDoc> for DensityMatrix {
    type Error = StateError;

    fn try_from(doc: DensityDoc) -> Result<Self, Self::Error> {
        let dim = 1usize
            .checked_shl(doc.n as u32)
            .ok_or_else(|| StateError::Schema(format!("n = {} is too large", doc.n)))?;
        if doc.rows.len() != dim {
            return Err(StateError::Schema(format!("expected {dim} rows for n = {}, found {}", doc.n, doc.rows.len())));
        }
        if let Some((i, row)) = doc.rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(StateError::Schema(format!("row {i} has {} entries, expected {dim}", row.len())));
        }
        let m = CMatrix::from_fn(dim, dim, |i, j| {
            let [re, im] = doc.rows[i][j];
            Complex64::new(re, im)
        });
        make_density(m)
    }
}

impl From<DensityMatrix> for DensityDoc {
    fn from(rho: DensityMatrix) -> Self {
        let n = rho.n();
        let m = rho.into_matrix();
        let rows = m
            .row_iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        DensityDoc { n, rows }
    }
}

impl TryFrom<ObservableDoc> for PauliObservable {
    type Error = StateError;

    fn try_from(doc: ObservableDoc) -> Result<Self, Self::Error> {
        let terms = doc
            .terms
            .iter()
            .map(|t| Ok(PauliTerm { coeff: t.coeff, string: t.letters.parse()? }))
            .collect::<Result<Vec<_>, StateError>>()?;
        PauliObservable::new(doc.n, terms)
    }
}

impl From<PauliObservable> for ObservableDoc {
    fn from(o: PauliObservable) -> Self {
        let terms = o
            .terms()
            .iter()
            .map(|t| PauliTermDoc { coeff: t.coeff, letters: t.string.to_string() })
            .collect();
        ObservableDoc { n: o.n(), terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_json_round_trip() {
        let rho = DensityMatrix::basis(1, 1).mix_with_identity(0.3);
        let text = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&text).unwrap();
        assert!((back.matrix() - rho.matrix()).camax() < 1e-15);
    }

    #[test]
    fn density_json_shape_errors() {
        let err = serde_json::from_str::<DensityMatrix>(r#"{"n":1,"rows":[[[1,0],[0,0]]]}"#).unwrap_err();
        assert!(err.to_string().contains("expected 2 rows"), "{err}");
        let err = serde_json::from_str::<DensityMatrix>(r#"{"n":1,"rows":[[[0.5,0],[0,0]],[[0,0],[0.6,0]]]}"#).unwrap_err();
        assert!(err.to_string().contains("trace"), "{err}");
    }

    #[test]
    fn observable_json() {
        let o: PauliObservable =
            serde_json::from_str(r#"{"n":2,"terms":[{"coeff":0.5,"letters":"ZI"},{"coeff":0.5,"letters":"IZ"}]}"#).unwrap();
        assert_eq!(o, PauliObservable::mean_z(2));
        let text = serde_json::to_string(&o).unwrap();
        assert_eq!(text, r#"{"n":2,"terms":[{"coeff":0.5,"letters":"ZI"},{"coeff":0.5,"letters":"IZ"}]}"#);
    }
}
