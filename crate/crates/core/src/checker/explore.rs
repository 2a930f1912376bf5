//! Breadth-first exploration of transition relations into a [`TransitionSystem`].

use indexmap::IndexSet;
use rayon::prelude::*;
use thiserror::Error;

use crate::executor::{AsyncModel, ChannelBank, Topology};
use crate::graph::NodeId;
use crate::model::{apply_move, enabled_nodes, AlgoKind, Algorithm, GlobalState, ModelError, View};

/// Default cap on the number of distinct states.
pub const DEFAULT_BUDGET: usize = 10_000_000;

/// Budget from `DAGW_BUDGET` when set and valid, else [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> usize {
    std::env::var("DAGW_BUDGET").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

/// Edge label: which node moved, or which AMR channel delivered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    Move(NodeId),
    Delivery(usize),
}

impl EdgeLabel {
    const DELIVERY_BIT: u32 = 1 << 31;

    fn pack(self) -> u32 {
        match self {
            EdgeLabel::Move(v) => v.0 as u32,
            EdgeLabel::Delivery(c) => c as u32 | Self::DELIVERY_BIT,
        }
    }

    fn unpack(raw: u32) -> Self {
        if raw & Self::DELIVERY_BIT != 0 {
            EdgeLabel::Delivery((raw & !Self::DELIVERY_BIT) as usize)
        } else {
            EdgeLabel::Move(NodeId(raw as usize))
        }
    }

    pub fn mover(self) -> Option<NodeId> {
        match self {
            EdgeLabel::Move(v) => Some(v),
            EdgeLabel::Delivery(_) => None,
        }
    }
}

/// Labeled successor keys of one state.
pub type Successors = Vec<(Box<[u8]>, EdgeLabel)>;

/// A relation over byte-encoded states whose prefix is a [`GlobalState`]
/// encoding.
pub trait TransitionRelation: Sync {
    fn kind(&self) -> AlgoKind;

    /// Successor keys with labels, deduplicated, in a deterministic order.
    fn successors(&self, key: &[u8]) -> Result<Successors, ModelError>;

    /// Key of a global state with channels in sync.
    fn key_of(&self, state: &GlobalState) -> Box<[u8]>;

    /// Human-readable description of the model.
    fn model(&self) -> AsyncModel;
}

/// One-move relation on fresh values: every impedensable node, every action.
pub struct FreshRelation<'a> {
    algo: &'a dyn Algorithm,
}

impl<'a> FreshRelation<'a> {
    pub fn new(algo: &'a dyn Algorithm) -> Self {
        FreshRelation { algo }
    }
}

impl TransitionRelation for FreshRelation<'_> {
    fn kind(&self) -> AlgoKind {
        self.algo.kind()
    }

    fn successors(&self, key: &[u8]) -> Result<Successors, ModelError> {
        let state = GlobalState::decode(key)?;
        let mut out = Vec::new();
        for i in enabled_nodes(self.algo, &state) {
            for a in self.algo.actions(&View::fresh(&state, i))? {
                out.push((apply_move(self.algo, &state, i, a)?.encode().into_boxed_slice(), EdgeLabel::Move(i)));
            }
        }
        out.dedup();
        Ok(out)
    }

    fn key_of(&self, state: &GlobalState) -> Box<[u8]> {
        state.encode().into_boxed_slice()
    }

    fn model(&self) -> AsyncModel {
        AsyncModel::Fresh
    }
}

/// Relation over global state plus observation channels.
///
/// AMR: a step either delivers the oldest value of one channel, or lets one
/// node evaluate on the values delivered so far and move (publishing
/// atomically). AA: a step lets one node move on any combination of values
/// from its sources' publication windows.
pub struct ExtendedRelation<'a> {
    algo: &'a dyn Algorithm,
    topo: Topology,
    model: AsyncModel,
}

impl<'a> ExtendedRelation<'a> {
    pub fn new(algo: &'a dyn Algorithm, model: AsyncModel) -> Self {
        ExtendedRelation { algo, topo: Topology::new(algo), model }
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn split(&self, key: &[u8]) -> Result<(GlobalState, ChannelBank), ModelError> {
        let (state, used) = GlobalState::decode_prefix(key)?;
        let bank = ChannelBank::decode(self.model, &self.topo, self.algo.kind(), state.len(), &key[used..])?;
        Ok((state, bank))
    }

    fn join(&self, state: &GlobalState, bank: &ChannelBank) -> Box<[u8]> {
        let mut out = state.encode();
        bank.encode_into(state.len(), &mut out);
        out.into_boxed_slice()
    }

    fn moves_on(
        &self,
        state: &GlobalState,
        bank: &ChannelBank,
        i: NodeId,
        observed: &[crate::model::LocalState],
        out: &mut Successors,
    ) -> Result<(), ModelError> {
        let view = View { reader: i, observed };
        if !self.algo.impedensable(&view) {
            return Ok(());
        }
        for a in self.algo.actions(&view)? {
            let next = apply_move(self.algo, state, i, a.clone())?;
            let mut nb = bank.clone();
            nb.publish(&self.topo, i, &a);
            out.push((self.join(&next, &nb), EdgeLabel::Move(i)));
        }
        Ok(())
    }
}

impl TransitionRelation for ExtendedRelation<'_> {
    fn kind(&self) -> AlgoKind {
        self.algo.kind()
    }

    fn successors(&self, key: &[u8]) -> Result<Successors, ModelError> {
        let (state, bank) = self.split(key)?;
        let mut out = Vec::new();
        match self.model {
            AsyncModel::Fresh => {
                for i in self.algo.graph().nodes() {
                    self.moves_on(&state, &bank, i, state.states(), &mut out)?;
                }
            }
            AsyncModel::Amr { .. } => {
                for c in bank.pending() {
                    let mut nb = bank.clone();
                    nb.deliver(c);
                    out.push((self.join(&state, &nb), EdgeLabel::Delivery(c)));
                }
                for i in self.algo.graph().nodes() {
                    let observed = bank.view_of(&self.topo, &state, i);
                    self.moves_on(&state, &bank, i, &observed, &mut out)?;
                }
            }
            AsyncModel::Aa { .. } => {
                for i in self.algo.graph().nodes() {
                    let choices = bank.aa_choices(&self.topo, i);
                    let mut digits = vec![0usize; choices.len()];
                    let mut observed = state.states().to_vec();
                    loop {
                        for ((src, vals), &d) in choices.iter().zip(&digits) {
                            observed[src.0] = vals[d].clone();
                        }
                        self.moves_on(&state, &bank, i, &observed, &mut out)?;
                        let mut pos = 0;
                        while pos < digits.len() {
                            digits[pos] += 1;
                            if digits[pos] < choices[pos].1.len() {
                                break;
                            }
                            digits[pos] = 0;
                            pos += 1;
                        }
                        if pos == digits.len() {
                            break;
                        }
                    }
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|e| seen.insert(e.clone()));
        Ok(out)
    }

    fn key_of(&self, state: &GlobalState) -> Box<[u8]> {
        let bank = ChannelBank::new(self.model, &self.topo, state);
        self.join(state, &bank)
    }

    fn model(&self) -> AsyncModel {
        self.model
    }
}

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("state budget of {budget} exceeded after {explored} states")]
    BudgetExceeded { budget: usize, explored: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Explored states and edges. State ids follow discovery order; edges are
/// stored in compressed-row form.
#[derive(Clone, Debug)]
pub struct TransitionSystem {
    kind: AlgoKind,
    model: AsyncModel,
    keys: IndexSet<Box<[u8]>>,
    initial: Vec<usize>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    labels: Vec<u32>,
}

impl TransitionSystem {
    /// Builds a system from explicit parts; used for hand-made fixtures.
    pub fn from_parts(
        kind: AlgoKind,
        keys: Vec<Box<[u8]>>,
        initial: Vec<usize>,
        edges: &[(usize, usize, EdgeLabel)],
    ) -> Self {
        let keys: IndexSet<Box<[u8]>> = keys.into_iter().collect();
        let mut sorted: Vec<&(usize, usize, EdgeLabel)> = edges.iter().collect();
        sorted.sort_by_key(|e| e.0);
        let mut offsets = vec![0; keys.len() + 1];
        for e in &sorted {
            offsets[e.0 + 1] += 1;
        }
        for k in 0..keys.len() {
            offsets[k + 1] += offsets[k];
        }
        TransitionSystem {
            kind,
            model: AsyncModel::Fresh,
            keys,
            initial,
            offsets,
            targets: sorted.iter().map(|e| e.1 as u32).collect(),
            labels: sorted.iter().map(|e| e.2.pack()).collect(),
        }
    }

    pub fn kind(&self) -> AlgoKind {
        self.kind
    }

    pub fn model(&self) -> AsyncModel {
        self.model
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn key(&self, id: usize) -> &[u8] {
        &self.keys[id]
    }

    pub fn id_of(&self, key: &[u8]) -> Option<usize> {
        self.keys.get_index_of(key)
    }

    /// The global-state part of state `id`.
    pub fn global(&self, id: usize) -> GlobalState {
        GlobalState::decode_prefix(&self.keys[id]).expect("explored keys decode").0
    }

    pub fn successors(&self, id: usize) -> impl Iterator<Item = (usize, EdgeLabel)> + '_ {
        let range = self.offsets[id]..self.offsets[id + 1];
        self.targets[range.clone()].iter().zip(&self.labels[range]).map(|(&t, &l)| (t as usize, EdgeLabel::unpack(l)))
    }

    pub fn out_degree(&self, id: usize) -> usize {
        self.offsets[id + 1] - self.offsets[id]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, EdgeLabel)> + '_ {
        (0..self.len()).flat_map(move |s| self.successors(s).map(move |(t, l)| (s, t, l)))
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.out_degree(s) == 0).collect()
    }

    /// Predecessor lists, built on demand.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.len()];
        for (s, t, _) in self.edges() {
            preds[t].push(s);
        }
        preds
    }
}

/// Breadth-first closure of `relation` from `inits`.
///
/// Each level is expanded in parallel; the merge walks the level in id
/// order, so ids and edges are independent of the number of workers.
pub fn explore(
    relation: &dyn TransitionRelation,
    inits: impl IntoIterator<Item = GlobalState>,
    budget: usize,
) -> Result<TransitionSystem, ExploreError> {
    let mut keys: IndexSet<Box<[u8]>> = IndexSet::new();
    let mut initial = Vec::new();
    for s in inits {
        let (id, _) = keys.insert_full(relation.key_of(&s));
        initial.push(id);
        if keys.len() > budget {
            return Err(ExploreError::BudgetExceeded { budget, explored: keys.len() });
        }
    }
    initial.dedup();
    let mut offsets = vec![0usize];
    let mut targets: Vec<u32> = Vec::new();
    let mut labels: Vec<u32> = Vec::new();
    let mut done = 0;
    while done < keys.len() {
        let level_end = keys.len();
        let expanded: Vec<Result<Successors, ModelError>> =
            (done..level_end).into_par_iter().map(|id| relation.successors(&keys[id])).collect();
        for succ in expanded {
            for (key, label) in succ? {
                let (t, _) = keys.insert_full(key);
                targets.push(t as u32);
                labels.push(label.pack());
            }
            offsets.push(targets.len());
            if keys.len() > budget {
                return Err(ExploreError::BudgetExceeded { budget, explored: keys.len() });
            }
        }
        done = level_end;
    }
    Ok(TransitionSystem { kind: relation.kind(), model: relation.model(), keys, initial, offsets, targets, labels })
}
