//! Execution traces with move and round accounting.

use serde::Serialize;

use crate::graph::NodeId;
use crate::model::{ExtValue, LocalState};

/// One recorded event. Node labels serialize 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    GuardEval {
        step: u64,
        #[serde(serialize_with = "label")]
        node: NodeId,
        enabled: bool,
    },
    Move {
        step: u64,
        #[serde(serialize_with = "label")]
        node: NodeId,
        pre: LocalState,
        post: LocalState,
    },
    Delivery {
        step: u64,
        #[serde(serialize_with = "label")]
        source: NodeId,
        #[serde(serialize_with = "label")]
        reader: NodeId,
        value: LocalState,
    },
    RoundBoundary { step: u64, round: u64 },
    /// Rank of the true global state after a step that contained moves.
    Rank { step: u64, rank: ExtValue },
}

fn label<S: serde::Serializer>(node: &NodeId, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(node.label() as u64)
}

/// Ordered event log.
///
/// A round boundary is emitted as soon as every node has evaluated its guard
/// at least once since the previous boundary.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    events: Vec<Event>,
    moves: u64,
    rounds: u64,
    evaluated: Vec<bool>,
    pending: usize,
}

impl Trace {
    pub fn new(n: usize) -> Self {
        Trace { events: Vec::new(), moves: 0, rounds: 0, evaluated: vec![false; n], pending: n }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn moves(&self) -> u64 {
        self.moves
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn guard_eval(&mut self, step: u64, node: NodeId, enabled: bool) {
        self.events.push(Event::GuardEval { step, node, enabled });
        if !self.evaluated[node.0] {
            self.evaluated[node.0] = true;
            self.pending -= 1;
        }
    }

    pub fn moved(&mut self, step: u64, node: NodeId, pre: LocalState, post: LocalState) {
        self.moves += 1;
        self.events.push(Event::Move { step, node, pre, post });
    }

    pub fn delivered(&mut self, step: u64, source: NodeId, reader: NodeId, value: LocalState) {
        self.events.push(Event::Delivery { step, source, reader, value });
    }

    pub fn ranked(&mut self, step: u64, rank: ExtValue) {
        self.events.push(Event::Rank { step, rank });
    }

    /// Emits a round boundary if every node has evaluated since the last one.
    pub fn close_round_if_complete(&mut self, step: u64) -> bool {
        if self.pending > 0 || self.evaluated.is_empty() {
            return false;
        }
        self.rounds += 1;
        self.events.push(Event::RoundBoundary { step, round: self.rounds });
        self.evaluated.iter_mut().for_each(|e| *e = false);
        self.pending = self.evaluated.len();
        true
    }
}
