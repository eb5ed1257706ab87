//! JSON state files.
//!
//! ```text
//! {"dims": [2, 2], "matrix": [[[re, im], ...], ...]}   density matrix, row-major
//! {"dims": [2, 2], "vector": [[re, im], ...]}          pure state
//! ```

use serde::{Deserialize, Serialize};

use super::{c, validate_density, CMatrix, CVector, DensityMatrix, PureStateVector, STATE_TOL};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawState {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<[f64; 2]>>,
}

/// Either kind of state file.
#[derive(Clone, Debug)]
pub enum StateFile {
    Density(DensityMatrix),
    Pure(PureStateVector),
}

impl StateFile {
    /// Density matrix view; pure files are turned into projectors.
    pub fn into_density(self) -> DensityMatrix {
        match self {
            StateFile::Density(d) => d,
            StateFile::Pure(p) => p.density(),
        }
    }
}

fn format_err(field: &str, msg: impl Into<String>) -> Error {
    Error::Format {
        field: field.to_string(),
        msg: msg.into(),
    }
}

fn check_finite(field: &str, pair: &[f64; 2]) -> Result<()> {
    if pair[0].is_finite() && pair[1].is_finite() {
        Ok(())
    } else {
        Err(format_err(field, "non-finite entry"))
    }
}

impl RawState {
    pub(crate) fn into_state(self, tol: f64) -> Result<StateFile> {
        match (self.matrix, self.vector) {
            (Some(rows), None) => {
                let n = rows.len();
                let mut m = CMatrix::zeros(n, n);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(format_err(
                            "matrix",
                            format!("row {i} has {} entries, expected {n}", row.len()),
                        ));
                    }
                    for (j, z) in row.iter().enumerate() {
                        check_finite("matrix", z)?;
                        m[(i, j)] = c(z[0], z[1]);
                    }
                }
                Ok(StateFile::Density(validate_density(&m, &self.dims, tol)?))
            }
            (None, Some(v)) => {
                for z in &v {
                    check_finite("vector", z)?;
                }
                let amps = CVector::from_iterator(v.len(), v.iter().map(|z| c(z[0], z[1])));
                Ok(StateFile::Pure(PureStateVector::new(amps, &self.dims)?))
            }
            (Some(_), Some(_)) => Err(format_err("matrix", "both `matrix` and `vector` given")),
            (None, None) => Err(format_err("matrix", "one of `matrix` or `vector` is required")),
        }
    }

    pub(crate) fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        RawState {
            dims: rho.dims().to_vec(),
            matrix: Some(
                (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                    .collect(),
            ),
            vector: None,
        }
    }

    pub(crate) fn from_pure(psi: &PureStateVector) -> Self {
        RawState {
            dims: psi.dims().to_vec(),
            matrix: None,
            vector: Some(psi.amplitudes().iter().map(|z| [z.re, z.im]).collect()),
        }
    }
}

/// Parses a state file, validating at the default tolerance.
pub fn parse_state(text: &str) -> Result<StateFile> {
    parse_state_with_tol(text, STATE_TOL)
}

pub fn parse_state_with_tol(text: &str, tol: f64) -> Result<StateFile> {
    let raw: RawState = serde_json::from_str(text)?;
    raw.into_state(tol)
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&RawState::from_density(rho)).expect("state serializes")
}

pub fn pure_to_json(psi: &PureStateVector) -> String {
    serde_json::to_string(&RawState::from_pure(psi)).expect("state serializes")
}
