//! JSON model files.
//!
//! ```json
//! {"n_qubits": 1,
//!  "hamiltonian": [[[0, 0], [0.5, 0]], [[0.5, 0], [0, 0]]],
//!  "jumps": [[[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]]}
//! ```
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use super::LindbladModel;
use crate::error::{shape, Result};
use crate::matcore::{CMat, C64};

type MatJson = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n_qubits: u32,
    pub hamiltonian: MatJson,
    #[serde(default)]
    pub jumps: Vec<MatJson>,
}

fn to_cmat(name: &str, m: &MatJson, dim: usize) -> Result<CMat> {
    if m.len() != dim || m.iter().any(|row| row.len() != dim) {
        return Err(shape(format!("{name} must be {dim}x{dim}")));
    }
    CMat::from_rows(&m.iter().map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect()).collect::<Vec<_>>())
}

fn from_cmat(m: &CMat) -> MatJson {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

impl ModelFile {
    pub fn into_model(self) -> Result<LindbladModel> {
        if self.n_qubits == 0 || self.n_qubits > 12 {
            return Err(shape(format!("n_qubits = {} is out of range 1..=12", self.n_qubits)));
        }
        let dim = 1usize << self.n_qubits;
        let h = to_cmat("hamiltonian", &self.hamiltonian, dim)?;
        let jumps = self
            .jumps
            .iter()
            .enumerate()
            .map(|(i, j)| to_cmat(&format!("jump {i}"), j, dim))
            .collect::<Result<Vec<_>>>()?;
        LindbladModel::new(h, jumps)
    }

    pub fn from_model(model: &LindbladModel) -> Self {
        Self {
            n_qubits: model.n_qubits().unwrap_or(0),
            hamiltonian: from_cmat(model.hamiltonian()),
            jumps: model.jumps().iter().map(from_cmat).collect(),
        }
    }
}

/// Parses and validates a model file. Syntax errors carry line and column.
pub fn model_from_json(text: &str) -> Result<LindbladModel> {
    let file: ModelFile = serde_json::from_str(text)?;
    file.into_model()
}

pub fn model_to_json(model: &LindbladModel) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model serializes")
}
