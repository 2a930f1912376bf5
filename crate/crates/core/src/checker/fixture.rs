//! Hand-built transition systems loaded from JSON.
//!
//! ```json
//! {"schema": 1, "algo": "mm",
//!  "states": [[{"match": "T"}, {"match": "T"}], [{"match": 2}, {"match": "T"}]],
//!  "initial": [0], "edges": [[0, 1, 1], [1, 0, 1]], "optimal": [false, false]}
//! ```
//!
//! Edges are `[from, to, mover]` with 0-based state indices and a 1-based
//! mover label.

use serde::Deserialize;
use thiserror::Error;

use crate::checker::explore::{EdgeLabel, TransitionSystem};
use crate::graph::NodeId;
use crate::model::{AlgoKind, GlobalState, LocalState, ModelError};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureFile {
    schema: u32,
    algo: AlgoKind,
    states: Vec<Vec<LocalState>>,
    initial: Vec<usize>,
    edges: Vec<(usize, usize, usize)>,
    #[serde(default)]
    optimal: Option<Vec<bool>>,
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("invalid fixture JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported fixture schema {0}")]
    Schema(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Invalid(String),
}

/// A fixture system and, when given, its optimal flags.
pub struct Fixture {
    pub system: TransitionSystem,
    pub optimal: Option<Vec<bool>>,
}

pub fn parse_fixture(text: &str) -> Result<Fixture, FixtureError> {
    let f: FixtureFile = serde_json::from_str(text)?;
    if f.schema != 1 {
        return Err(FixtureError::Schema(f.schema));
    }
    let count = f.states.len();
    let n = f.states.first().map_or(0, Vec::len);
    let mut keys: Vec<Box<[u8]>> = Vec::with_capacity(count);
    for locals in f.states {
        if locals.len() != n {
            return Err(FixtureError::Invalid("states have different lengths".into()));
        }
        let key = GlobalState::new(f.algo, locals)?.encode().into_boxed_slice();
        if keys.contains(&key) {
            return Err(FixtureError::Invalid("duplicate state".into()));
        }
        keys.push(key);
    }
    let in_range = |k: usize| k < count;
    if !f.initial.iter().all(|&k| in_range(k)) || f.initial.is_empty() {
        return Err(FixtureError::Invalid("initial states must be valid indices".into()));
    }
    let mut edges = Vec::with_capacity(f.edges.len());
    for (s, t, mover) in f.edges {
        if !in_range(s) || !in_range(t) || mover == 0 || mover > n {
            return Err(FixtureError::Invalid(format!("edge [{s}, {t}, {mover}] out of range")));
        }
        edges.push((s, t, EdgeLabel::Move(NodeId(mover - 1))));
    }
    if f.optimal.as_ref().is_some_and(|o| o.len() != count) {
        return Err(FixtureError::Invalid("one optimal flag per state".into()));
    }
    Ok(Fixture { system: TransitionSystem::from_parts(f.algo, keys, f.initial, &edges), optimal: f.optimal })
}
