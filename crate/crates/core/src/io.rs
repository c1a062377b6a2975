//! JSON wire formats.
//!
//! States travel as `{"modes": 1|2, "matrix": [[[re, im], ...], ...]}` with
//! the full redundant Hermitian matrix, row-major. The loader enforces
//! Hermiticity and the commutator diagonal structure. All floats are
//! written with 17 significant digits, which reproduces IEEE-754 doubles
//! bit-for-bit on re-parse.

use std::io::Write;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{HermitianMatrix, C64};
use crate::semigroup::Trajectory;
use crate::states::{SingleModeState, TwoModeState};
use crate::Result;

/// 17-significant-digit rendering used for every float we emit.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes `value` as JSON with 17-significant-digit floats.
pub fn write_json<T: Serialize>(value: &T, sink: &mut dyn Write) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut *sink, SciFormatter);
    value.serialize(&mut ser)?;
    sink.write_all(b"\n")?;
    Ok(())
}

/// Renders `value` to a JSON string with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_json(value, &mut buf)?;
    Ok(String::from_utf8(buf).expect("serde_json emits utf-8"))
}

pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// On-disk state document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub modes: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// A parsed state of either mode count.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Single(SingleModeState),
    Two(TwoModeState),
}

impl LoadedState {
    pub fn modes(&self) -> usize {
        match self {
            LoadedState::Single(_) => 1,
            LoadedState::Two(_) => 2,
        }
    }

    pub fn matrix(&self) -> HermitianMatrix {
        match self {
            LoadedState::Single(s) => s.matrix(),
            LoadedState::Two(s) => s.matrix().clone(),
        }
    }
}

/// Rebuilds a Hermitian matrix from its JSON grid, enforcing shape and
/// Hermiticity.
pub fn matrix_from_json(grid: &[Vec<[f64; 2]>]) -> Result<HermitianMatrix> {
    let dim = grid.len();
    if dim != 2 && dim != 4 {
        return Err(Error::Structure(format!("matrix must be 2x2 or 4x4, got {dim} rows")));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for row in grid {
        if row.len() != dim {
            return Err(Error::Structure(format!(
                "matrix rows must have {dim} entries, got {}",
                row.len()
            )));
        }
        for &[re, im] in row {
            entries.push(C64::new(re, im));
        }
    }
    HermitianMatrix::new(dim, entries)
}

pub fn matrix_to_json(g: &HermitianMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..g.dim())
        .map(|j| (0..g.dim()).map(|k| [g.get(j, k).re, g.get(j, k).im]).collect())
        .collect()
}

/// Parses a state document, enforcing Hermiticity and commutator structure.
pub fn state_from_json(text: &str) -> Result<LoadedState> {
    let doc: StateDocument = serde_json::from_str(text)?;
    let g = matrix_from_json(&doc.matrix)?;
    match doc.modes {
        1 if g.dim() == 2 => Ok(LoadedState::Single(SingleModeState::from_matrix(&g)?)),
        2 if g.dim() == 4 => Ok(LoadedState::Two(TwoModeState::from_matrix(g)?)),
        m => Err(Error::Structure(format!(
            "modes field {m} does not match a {}x{} matrix",
            g.dim(),
            g.dim()
        ))),
    }
}

pub fn state_to_document(state: &LoadedState) -> StateDocument {
    StateDocument { modes: state.modes(), matrix: matrix_to_json(&state.matrix()) }
}

/// JSON mirror of a [`Trajectory`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDocument {
    pub modes: usize,
    pub times: Vec<f64>,
    pub min_eig_g: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_eig_g1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_eig_g2: Option<Vec<f64>>,
    pub states: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn trajectory_to_json(tr: &Trajectory) -> TrajectoryDocument {
    TrajectoryDocument {
        modes: tr.modes(),
        times: tr.times.clone(),
        min_eig_g: tr.min_eig_g.clone(),
        min_eig_g1: tr.min_eig_g1.clone(),
        min_eig_g2: tr.min_eig_g2.clone(),
        states: tr.states.iter().map(matrix_to_json).collect(),
    }
}

pub fn trajectory_from_json(text: &str) -> Result<Trajectory> {
    let doc: TrajectoryDocument = serde_json::from_str(text)?;
    let states = doc
        .states
        .iter()
        .map(|m| matrix_from_json(m))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: doc.times,
        states,
        min_eig_g: doc.min_eig_g,
        min_eig_g1: doc.min_eig_g1,
        min_eig_g2: doc.min_eig_g2,
    })
}
