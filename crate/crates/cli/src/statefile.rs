//! On-disk assignments: `{"kind": ..., "labels": [...], "data": [...]}`.
//!
//! Classical files hold one probability per label. Quantum files hold a
//! `dim × dim` density matrix as a flat row-major list of `[re, im]` pairs, with
//! one label per basis vector.

use std::path::Path;

use epistemic_qm::classical::{OutcomeSpace, ProbDist};
use epistemic_qm::numerics::ComplexMatrix;
use epistemic_qm::quantum::DensityOperator;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Classical,
    Quantum,
}

/// A complex entry written either as `[re, im]` or `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Entry {
    Pair([f64; 2]),
    Object { re: f64, im: f64 },
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Pair([re, im]) | Entry::Object { re, im } => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStateFile {
    kind: Kind,
    labels: Vec<String>,
    data: Value,
}

/// A parsed and validated assignment.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFile {
    Classical(ProbDist),
    Quantum {
        labels: Vec<String>,
        state: DensityOperator,
    },
}

impl StateFile {
    pub fn kind(&self) -> Kind {
        match self {
            StateFile::Classical(_) => Kind::Classical,
            StateFile::Quantum { .. } => Kind::Quantum,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawStateFile =
            serde_json::from_str(text).map_err(|e| CliError::usage(format!("parse error: {e}")))?;
        match raw.kind {
            Kind::Classical => {
                let probs: Vec<f64> = serde_json::from_value(raw.data).map_err(|e| {
                    CliError::usage(format!("classical data must be a list of numbers: {e}"))
                })?;
                let space = OutcomeSpace::new(raw.labels)?;
                Ok(StateFile::Classical(ProbDist::new(space, probs)?))
            }
            Kind::Quantum => {
                let entries: Vec<Entry> = serde_json::from_value(raw.data).map_err(|e| {
                    CliError::usage(format!(
                        "quantum data must be a list of [re, im] pairs: {e}"
                    ))
                })?;
                let dim = raw.labels.len();
                if entries.len() != dim * dim {
                    return Err(CliError::usage(format!(
                        "{} labels need {} matrix entries, found {}",
                        dim,
                        dim * dim,
                        entries.len()
                    )));
                }
                OutcomeSpace::new(raw.labels.clone())?;
                let matrix = ComplexMatrix::from_entries(
                    dim,
                    entries.into_iter().map(Complex64::from).collect(),
                )?;
                Ok(StateFile::Quantum {
                    labels: raw.labels,
                    state: DensityOperator::new(matrix)?,
                })
            }
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> Value {
        match self {
            StateFile::Classical(d) => dist_file(d),
            StateFile::Quantum { labels, state } => state_file(labels, state),
        }
    }
}

/// Computational-basis labels: binary strings for power-of-two dimensions.
pub fn basis_labels(dim: usize) -> Vec<String> {
    if dim.is_power_of_two() && dim > 1 {
        let width = dim.trailing_zeros() as usize;
        (0..dim).map(|k| format!("{k:0width$b}")).collect()
    } else {
        (0..dim).map(|k| k.to_string()).collect()
    }
}

pub fn dist_file(d: &ProbDist) -> Value {
    json!({"kind": "classical", "labels": d.space().labels(), "data": d.probs()})
}

pub fn state_file(labels: &[String], state: &DensityOperator) -> Value {
    let data: Vec<[f64; 2]> = state
        .matrix()
        .entries()
        .iter()
        .map(|z| [z.re, z.im])
        .collect();
    json!({"kind": "quantum", "labels": labels, "data": data})
}

/// A state in the computational basis, ready to be written as a state file.
pub fn quantum_json(state: &DensityOperator) -> Value {
    state_file(&basis_labels(state.dim()), state)
}
