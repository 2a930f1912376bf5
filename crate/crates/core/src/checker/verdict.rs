//! Verdicts, counterexamples and replay.

use serde::Serialize;

use crate::checker::explore::{EdgeLabel, TransitionRelation, TransitionSystem};

/// What a property is expected to do on a given configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Pass,
    Fail,
    /// Measured and reported; either outcome is acceptable.
    Report,
}

/// A replayable sequence of explored states starting at an initial state.
///
/// When `cycle_start` is set, the last state equals `path[cycle_start]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub path: Vec<usize>,
    pub cycle_start: Option<usize>,
    pub states: Vec<String>,
    pub keys: Vec<String>,
    pub note: String,
}

impl Counterexample {
    pub fn new(ts: &TransitionSystem, path: Vec<usize>, cycle_start: Option<usize>, note: impl Into<String>) -> Self {
        Counterexample {
            states: path.iter().map(|&id| ts.global(id).to_string()).collect(),
            keys: path.iter().map(|&id| hex::encode(ts.key(id))).collect(),
            path,
            cycle_start,
            note: note.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyVerdict {
    pub name: String,
    pub expected: Expectation,
    /// Whether the property holds on the explored system.
    pub holds: bool,
    /// Whether the outcome matches the expectation.
    pub ok: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl PropertyVerdict {
    pub fn new(name: &str, expected: Expectation, holds: bool, detail: impl Into<String>) -> Self {
        let ok = match expected {
            Expectation::Pass => holds,
            Expectation::Fail => !holds,
            Expectation::Report => true,
        };
        PropertyVerdict { name: name.into(), expected, holds, ok, detail: detail.into(), counterexample: None }
    }

    pub fn with_counterexample(mut self, cex: Option<Counterexample>) -> Self {
        self.counterexample = cex;
        self
    }

    pub fn expecting(self, expected: Expectation) -> Self {
        PropertyVerdict::new(&self.name, expected, self.holds, self.detail).with_counterexample(self.counterexample)
    }
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("counterexample is empty")]
    Empty,
    #[error("state {0} is not initial")]
    NotInitial(usize),
    #[error("no transition from step {0} to step {1}")]
    MissingEdge(usize, usize),
    #[error("cycle marker does not close the path")]
    OpenCycle,
    #[error("recorded key at step {0} does not match the system")]
    KeyMismatch(usize),
}

/// Checks that `cex` is a path from an initial state. With a relation, each
/// step is re-derived from the relation's successor function rather than
/// the stored edges.
pub fn replay(
    ts: &TransitionSystem,
    relation: Option<&dyn TransitionRelation>,
    cex: &Counterexample,
) -> Result<(), ReplayError> {
    let first = *cex.path.first().ok_or(ReplayError::Empty)?;
    if !ts.initial().contains(&first) {
        return Err(ReplayError::NotInitial(first));
    }
    for (k, (&id, key)) in cex.path.iter().zip(&cex.keys).enumerate() {
        if hex::encode(ts.key(id)) != *key {
            return Err(ReplayError::KeyMismatch(k));
        }
    }
    for (k, pair) in cex.path.windows(2).enumerate() {
        let (s, t) = (pair[0], pair[1]);
        let found = match relation {
            Some(rel) => rel
                .successors(ts.key(s))
                .map_err(|_| ReplayError::MissingEdge(k, k + 1))?
                .iter()
                .any(|(key, _)| **key == *ts.key(t)),
            None => ts.successors(s).any(|(x, _)| x == t),
        };
        if !found {
            return Err(ReplayError::MissingEdge(k, k + 1));
        }
    }
    if let Some(c) = cex.cycle_start {
        if cex.path.get(c) != cex.path.last() || c + 1 >= cex.path.len() {
            return Err(ReplayError::OpenCycle);
        }
    }
    Ok(())
}

/// Breadth-first parent pointers from the initial states.
pub fn bfs_parents(ts: &TransitionSystem) -> Vec<Option<usize>> {
    let mut parent = vec![None; ts.len()];
    let mut seen = vec![false; ts.len()];
    let mut queue = std::collections::VecDeque::new();
    for &i in ts.initial() {
        if !seen[i] {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(s) = queue.pop_front() {
        for (t, _) in ts.successors(s) {
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some(s);
                queue.push_back(t);
            }
        }
    }
    parent
}

/// Shortest path from an initial state to `target`.
pub fn path_to(parents: &[Option<usize>], target: usize) -> Vec<usize> {
    let mut path = vec![target];
    let mut cur = target;
    while let Some(p) = parents[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    path
}

/// Label of the first edge `s → t`.
pub fn edge_label(ts: &TransitionSystem, s: usize, t: usize) -> Option<EdgeLabel> {
    ts.successors(s).find(|&(x, _)| x == t).map(|(_, l)| l)
}
