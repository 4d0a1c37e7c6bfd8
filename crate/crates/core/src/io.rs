//! JSON exchange formats for matrices and states.
//!
//! Density matrix: `{"d_a": 2, "d_b": 2, "re": [[...]], "im": [[...]]}`,
//! row-major. Floats are written in shortest round-trip form, so a
//! write/read cycle is bit-exact. Readers validate state invariants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::state::{BipartiteDims, DensityMatrix, PureState};

/// Bare complex matrix as separate real and imaginary row arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: fn(&num_complex::Complex64) -> f64| {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    /// Requires a square `n × n` layout in both parts.
    pub fn to_matrix(&self, n: usize) -> Result<CMatrix> {
        let ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !ok(&self.re) || !ok(&self.im) {
            return Err(Error::Schema(format!("expected {n}x{n} 're' and 'im' arrays")));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| c(self.re[i][j], self.im[i][j])))
    }

    pub fn order(&self) -> usize {
        self.re.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixJson {
    pub d_a: usize,
    pub d_b: usize,
    #[serde(flatten)]
    pub entries: ComplexMatrixJson,
}

impl DensityMatrixJson {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self {
            d_a: rho.dims().d_a(),
            d_b: rho.dims().d_b(),
            entries: ComplexMatrixJson::from_matrix(rho.matrix()),
        }
    }

    /// Shape problems are schema errors; anything else comes from state validation.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        let dims = BipartiteDims::new(self.d_a, self.d_b).map_err(|e| Error::Schema(e.to_string()))?;
        let m = self.entries.to_matrix(dims.total())?;
        DensityMatrix::new(dims, m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureStateJson {
    pub d_a: usize,
    pub d_b: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl PureStateJson {
    pub fn from_state(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        Self {
            d_a: psi.dims().d_a(),
            d_b: psi.dims().d_b(),
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_state(&self) -> Result<PureState> {
        let dims = BipartiteDims::new(self.d_a, self.d_b).map_err(|e| Error::Schema(e.to_string()))?;
        if self.re.len() != dims.total() || self.im.len() != dims.total() {
            return Err(Error::Schema(format!("expected {} amplitudes", dims.total())));
        }
        let v = CVector::from_fn(dims.total(), |i, _| c(self.re[i], self.im[i]));
        PureState::new(dims, v)
    }
}

/// Ensemble member: a pure state with its weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedStateJson {
    pub weight: f64,
    #[serde(flatten)]
    pub state: PureStateJson,
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&DensityMatrixJson::from_state(rho)).expect("serializable")
}

pub fn density_from_json(text: &str) -> Result<DensityMatrix> {
    let doc: DensityMatrixJson =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    doc.to_state()
}

/// Reads a density matrix, or a pure state given as amplitude vectors.
pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let pure = value
        .get("re")
        .and_then(|re| re.as_array())
        .and_then(|re| re.first())
        .is_some_and(|x| x.is_number());
    if pure {
        let doc: PureStateJson = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
        Ok(doc.to_state()?.density_matrix())
    } else {
        let doc: DensityMatrixJson = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
        doc.to_state()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample_ginibre_mixed;

    #[test]
    fn density_round_trip_is_bit_exact() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let rho = sample_ginibre_mixed(dims, 4, 17).unwrap();
        let back = density_from_json(&density_to_json(&rho)).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn reader_distinguishes_schema_and_invariant_errors() {
        assert!(matches!(density_from_json("{\"d_a\": 2}"), Err(Error::Schema(_))));
        let ragged = r#"{"d_a":2,"d_b":2,"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]}"#;
        assert!(matches!(density_from_json(ragged), Err(Error::Schema(_))));
        let zero = vec![vec![0.0; 4]; 4];
        let mut re = zero.clone();
        re[0][0] = 2.0;
        let doc = DensityMatrixJson {
            d_a: 2,
            d_b: 2,
            entries: ComplexMatrixJson { re, im: zero },
        };
        let text = serde_json::to_string(&doc).unwrap();
        assert!(matches!(density_from_json(&text), Err(Error::Invariant(_))));
    }

    #[test]
    fn pure_state_json_round_trip() {
        let psi = crate::sampling::sample_haar_pure(BipartiteDims::square(2).unwrap(), 5);
        let doc = PureStateJson::from_state(&psi);
        let text = serde_json::to_string(&WeightedStateJson { weight: 0.25, state: doc }).unwrap();
        let back: WeightedStateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.weight, 0.25);
        assert_eq!(back.state.to_state().unwrap(), psi);
    }

    #[test]
    fn state_reader_accepts_pure_and_mixed() {
        let pure = r#"{"d_a":2,"d_b":2,"re":[0.6,0,0,0.8],"im":[0,0,0,0]}"#;
        let rho = state_from_json(pure).unwrap();
        assert!((rho.matrix()[(0, 3)].re - 0.48).abs() < 1e-15);
        let mixed = density_to_json(&rho);
        assert_eq!(state_from_json(&mixed).unwrap(), density_from_json(&mixed).unwrap());
        assert!(matches!(state_from_json("[1, 2]"), Err(Error::Schema(_))));
        let unnormalized = r#"{"d_a":2,"d_b":2,"re":[1,0,0,1],"im":[0,0,0,0]}"#;
        assert!(matches!(state_from_json(unnormalized), Err(Error::Invariant(_))));
    }
}
