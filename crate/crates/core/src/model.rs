//! Algorithm-independent state model.
//!
//! A [`GlobalState`] is a vector of per-node [`LocalState`]s. Algorithms see
//! the system through a [`View`]: the reader's own true state plus a possibly
//! stale picture of everyone else. The [`Algorithm`] trait is the guarded-command
//! contract each of the three algorithms implements.

use std::fmt;
use std::ops::{Add, Index};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Dist, Graph, NodeId};

pub mod trace;

/// Which algorithm a state belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgoKind {
    Dc,
    Sp,
    Mm,
}

impl AlgoKind {
    fn tag(self) -> u8 {
        match self {
            AlgoKind::Dc => 1,
            AlgoKind::Sp => 2,
            AlgoKind::Mm => 3,
        }
    }

    fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(AlgoKind::Dc),
            2 => Some(AlgoKind::Sp),
            3 => Some(AlgoKind::Mm),
            _ => None,
        }
    }
}

impl fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgoKind::Dc => "dc",
            AlgoKind::Sp => "sp",
            AlgoKind::Mm => "mm",
        })
    }
}

impl FromStr for AlgoKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dc" => Ok(AlgoKind::Dc),
            "sp" => Ok(AlgoKind::Sp),
            "mm" => Ok(AlgoKind::Mm),
            other => Err(format!("unknown algorithm `{other}` (expected dc, sp or mm)")),
        }
    }
}

/// Set of nodes of a graph with at most 64 nodes, as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeSet(pub u64);

impl NodeSet {
    pub const MAX_NODES: usize = 64;

    pub fn empty() -> Self {
        NodeSet(0)
    }

    pub fn singleton(node: NodeId) -> Self {
        NodeSet(1 << node.0)
    }

    pub fn contains(self, node: NodeId) -> bool {
        node.0 < 64 && self.0 >> node.0 & 1 == 1
    }

    pub fn with(self, node: NodeId) -> Self {
        NodeSet(self.0 | 1 << node.0)
    }

    pub fn without(self, node: NodeId) -> Self {
        NodeSet(self.0 & !(1 << node.0))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection(self, other: NodeSet) -> Self {
        NodeSet(self.0 & other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = NodeId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(NodeId(k))
        })
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<T: IntoIterator<Item = NodeId>>(iter: T) -> Self {
        iter.into_iter().fold(NodeSet::empty(), NodeSet::with)
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.iter().map(|v| v.label().to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

/// Per-node state, tagged by algorithm. `None` pointers are ⊤.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "repr::LocalRepr", into = "repr::LocalRepr")]
pub enum LocalState {
    /// Dominant clique: `cliq`.
    Clique(NodeSet),
    /// Shortest path: next hop `p` and distance estimate `d`.
    Path { parent: Option<NodeId>, dist: Dist },
    /// Maximal matching: `match`.
    Match(Option<NodeId>),
}

impl LocalState {
    pub fn kind(&self) -> AlgoKind {
        match self {
            LocalState::Clique(_) => AlgoKind::Dc,
            LocalState::Path { .. } => AlgoKind::Sp,
            LocalState::Match(_) => AlgoKind::Mm,
        }
    }

    pub fn cliq(&self) -> NodeSet {
        match self {
            LocalState::Clique(c) => *c,
            other => panic!("expected a clique state, found {other}"),
        }
    }

    pub fn path(&self) -> (Option<NodeId>, Dist) {
        match self {
            LocalState::Path { parent, dist } => (*parent, *dist),
            other => panic!("expected a path state, found {other}"),
        }
    }

    pub fn mate(&self) -> Option<NodeId> {
        match self {
            LocalState::Match(m) => *m,
            other => panic!("expected a matching state, found {other}"),
        }
    }
}

fn fmt_slot(slot: Option<NodeId>) -> String {
    slot.map_or_else(|| "⊤".to_string(), |v| v.to_string())
}

impl fmt::Display for LocalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalState::Clique(c) => write!(f, "{c}"),
            LocalState::Path { parent, dist } => write!(f, "⟨{},{}⟩", fmt_slot(*parent), dist),
            LocalState::Match(m) => f.write_str(&fmt_slot(*m)),
        }
    }
}

mod repr {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub enum Slot {
        Node(usize),
        Top(String),
    }

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub enum DistRepr {
        Finite(u64),
        Infinite(String),
    }

    #[derive(Serialize, Deserialize)]
    #[serde(untagged, deny_unknown_fields)]
    pub enum LocalRepr {
        Clique { cliq: Vec<usize> },
        Path { p: Slot, d: DistRepr },
        Match { #[serde(rename = "match")] mate: Slot },
    }

    fn slot_out(slot: Option<NodeId>) -> Slot {
        slot.map_or_else(|| Slot::Top("T".into()), |v| Slot::Node(v.label()))
    }

    fn slot_in(slot: Slot) -> Result<Option<NodeId>, String> {
        match slot {
            Slot::Node(0) => Err("node labels are 1-based".into()),
            Slot::Node(k) => Ok(Some(NodeId(k - 1))),
            Slot::Top(t) if t == "T" => Ok(None),
            Slot::Top(t) => Err(format!("expected a node label or \"T\", found {t:?}")),
        }
    }

    impl From<LocalState> for LocalRepr {
        fn from(s: LocalState) -> Self {
            match s {
                LocalState::Clique(c) => LocalRepr::Clique { cliq: c.iter().map(NodeId::label).collect() },
                LocalState::Path { parent, dist } => LocalRepr::Path {
                    p: slot_out(parent),
                    d: match dist {
                        Dist::Finite(d) => DistRepr::Finite(d),
                        Dist::Infinite => DistRepr::Infinite("inf".into()),
                    },
                },
                LocalState::Match(m) => LocalRepr::Match { mate: slot_out(m) },
            }
        }
    }

    impl TryFrom<LocalRepr> for LocalState {
        type Error = String;

        fn try_from(r: LocalRepr) -> Result<Self, Self::Error> {
            Ok(match r {
                LocalRepr::Clique { cliq } => {
                    let mut set = NodeSet::empty();
                    for k in cliq {
                        if k == 0 || k > NodeSet::MAX_NODES {
                            return Err(format!("clique member {k} out of range"));
                        }
                        set = set.with(NodeId(k - 1));
                    }
                    LocalState::Clique(set)
                }
                LocalRepr::Path { p, d } => LocalState::Path {
                    parent: slot_in(p)?,
                    dist: match d {
                        DistRepr::Finite(d) => Dist::Finite(d),
                        DistRepr::Infinite(t) if t == "inf" => Dist::Infinite,
                        DistRepr::Infinite(t) => return Err(format!("expected a distance or \"inf\", found {t:?}")),
                    },
                },
                LocalRepr::Match { mate } => LocalState::Match(slot_in(mate)?),
            })
        }
    }
}

/// Vector of local states indexed by node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GlobalState {
    kind: AlgoKind,
    states: Vec<LocalState>,
}

impl GlobalState {
    /// Builds a state; every component must carry the same algorithm tag.
    pub fn new(kind: AlgoKind, states: Vec<LocalState>) -> Result<Self, ModelError> {
        if let Some(bad) = states.iter().find(|s| s.kind() != kind) {
            return Err(ModelError::WrongAlgorithm { expected: kind, found: bad.kind() });
        }
        Ok(GlobalState { kind, states })
    }

    pub fn kind(&self) -> AlgoKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[LocalState] {
        &self.states
    }

    pub fn states_mut(&mut self) -> &mut [LocalState] {
        &mut self.states
    }

    pub fn into_states(self) -> Vec<LocalState> {
        self.states
    }

    /// Copy with node `i` replaced; no validation.
    pub fn with_local(&self, node: NodeId, local: LocalState) -> GlobalState {
        let mut next = self.clone();
        next.states[node.0] = local;
        next
    }

    pub fn set(&mut self, node: NodeId, local: LocalState) {
        self.states[node.0] = local;
    }

    /// Injective byte encoding for a fixed graph and algorithm.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + self.states.len() * 2);
        self.encode_into(&mut out);
        out
    }

    pub fn encode_into(&self, out: &mut Vec<u8>) {
        out.push(self.kind.tag());
        write_varint(out, self.states.len() as u64);
        let n = self.states.len();
        for s in &self.states {
            encode_local(s, n, out);
        }
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, ModelError> {
        let (state, used) = Self::decode_prefix(bytes)?;
        if used != bytes.len() {
            return Err(ModelError::Decode("trailing bytes".into()));
        }
        Ok(state)
    }

    /// Decodes a state from the front of `bytes`, returning bytes consumed.
    pub fn decode_prefix(bytes: &[u8]) -> Result<(Self, usize), ModelError> {
        let mut cur = Cursor { bytes, pos: 0 };
        let kind = AlgoKind::from_tag(cur.byte()?).ok_or_else(|| ModelError::Decode("unknown algorithm tag".into()))?;
        let n = cur.varint()? as usize;
        let mut states = Vec::with_capacity(n);
        for _ in 0..n {
            states.push(decode_local(kind, n, &mut cur)?);
        }
        Ok((GlobalState { kind, states }, cur.pos))
    }

    /// Hex form of [`GlobalState::encode`], used as the state key in JSON.
    pub fn key_hex(&self) -> String {
        hex::encode(self.encode())
    }
}

impl Index<NodeId> for GlobalState {
    type Output = LocalState;

    fn index(&self, node: NodeId) -> &LocalState {
        &self.states[node.0]
    }
}

impl fmt::Display for GlobalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.states.iter().map(ToString::to_string).collect();
        write!(f, "⟨{}⟩", parts.join(","))
    }
}

impl Serialize for GlobalState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.states.serialize(serializer)
    }
}

fn slot_width(n: usize) -> usize {
    if n < 0xff {
        1
    } else if n < 0xffff {
        2
    } else {
        4
    }
}

fn write_slot(out: &mut Vec<u8>, slot: Option<NodeId>, n: usize) {
    let value = slot.map_or(n as u64, |v| v.0 as u64);
    out.extend_from_slice(&value.to_le_bytes()[..slot_width(n)]);
}

pub(crate) fn write_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

/// Encodes one local state; the width of node slots depends on `n`.
pub(crate) fn encode_local(s: &LocalState, n: usize, out: &mut Vec<u8>) {
    match s {
        LocalState::Clique(c) => out.extend_from_slice(&c.0.to_le_bytes()[..n.div_ceil(8).clamp(1, 8)]),
        LocalState::Path { parent, dist } => {
            write_slot(out, *parent, n);
            write_varint(out, dist.finite().map_or(0, |d| d + 1));
        }
        LocalState::Match(m) => write_slot(out, *m, n),
    }
}

pub(crate) struct Cursor<'a> {
    pub bytes: &'a [u8],
    pub pos: usize,
}

impl Cursor<'_> {
    pub fn byte(&mut self) -> Result<u8, ModelError> {
        let b = *self.bytes.get(self.pos).ok_or_else(|| ModelError::Decode("truncated".into()))?;
        self.pos += 1;
        Ok(b)
    }

    pub fn varint(&mut self) -> Result<u64, ModelError> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let b = self.byte()?;
            v |= u64::from(b & 0x7f) << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(ModelError::Decode("varint overflow".into()))
    }

    fn fixed(&mut self, width: usize) -> Result<u64, ModelError> {
        let mut buf = [0u8; 8];
        for b in buf.iter_mut().take(width) {
            *b = self.byte()?;
        }
        Ok(u64::from_le_bytes(buf))
    }

    fn slot(&mut self, n: usize) -> Result<Option<NodeId>, ModelError> {
        let v = self.fixed(slot_width(n))? as usize;
        match v.cmp(&n) {
            std::cmp::Ordering::Less => Ok(Some(NodeId(v))),
            std::cmp::Ordering::Equal => Ok(None),
            std::cmp::Ordering::Greater => Err(ModelError::Decode("node slot out of range".into())),
        }
    }
}

pub(crate) fn decode_local(kind: AlgoKind, n: usize, cur: &mut Cursor<'_>) -> Result<LocalState, ModelError> {
    Ok(match kind {
        AlgoKind::Dc => {
            let mask = cur.fixed(n.div_ceil(8).clamp(1, 8))?;
            if n < 64 && mask >> n != 0 {
                return Err(ModelError::Decode("clique member out of range".into()));
            }
            LocalState::Clique(NodeSet(mask))
        }
        AlgoKind::Sp => {
            let parent = cur.slot(n)?;
            let raw = cur.varint()?;
            let dist = if raw == 0 { Dist::Infinite } else { Dist::Finite(raw - 1) };
            LocalState::Path { parent, dist }
        }
        AlgoKind::Mm => LocalState::Match(cur.slot(n)?),
    })
}

/// Extended non-negative integer used for state values and ranks.
///
/// `Finite` may be negative only when a state value invariant is broken
/// (shortest-path estimates below the true distance).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtValue {
    Finite(i64),
    Infinite,
}

impl ExtValue {
    pub const ZERO: ExtValue = ExtValue::Finite(0);

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtValue::Finite(v) => Some(v),
            ExtValue::Infinite => None,
        }
    }
}

impl Add for ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: ExtValue) -> ExtValue {
        match (self, rhs) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a + b),
            _ => ExtValue::Infinite,
        }
    }
}

impl std::iter::Sum for ExtValue {
    fn sum<I: Iterator<Item = ExtValue>>(iter: I) -> ExtValue {
        iter.fold(ExtValue::ZERO, Add::add)
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Finite(v) => write!(f, "{v}"),
            ExtValue::Infinite => f.write_str("∞"),
        }
    }
}

impl Serialize for ExtValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtValue::Finite(v) => serializer.serialize_i64(*v),
            ExtValue::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// A reader's picture of the system.
///
/// `observed[reader]` is always the reader's true current state; other entries
/// may be stale. Algorithms must not read entries beyond their read radius.
#[derive(Clone, Copy, Debug)]
pub struct View<'a> {
    pub reader: NodeId,
    pub observed: &'a [LocalState],
}

impl<'a> View<'a> {
    pub fn fresh(state: &'a GlobalState, reader: NodeId) -> Self {
        View { reader, observed: state.states() }
    }

    pub fn own(&self) -> &'a LocalState {
        &self.observed[self.reader.0]
    }

    pub fn of(&self, node: NodeId) -> &'a LocalState {
        &self.observed[node.0]
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("node {node} is not impedensable in this view")]
    NotImpedensable { node: NodeId },
    #[error("invalid local state for {node}: {reason}")]
    InvalidLocal { node: NodeId, reason: String },
    #[error("expected a {expected} state, found {found}")]
    WrongAlgorithm { expected: AlgoKind, found: AlgoKind },
    #[error("state has {found} components, graph has {expected} nodes")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cannot decode state: {0}")]
    Decode(String),
}

/// Guarded-command contract shared by the three algorithms.
///
/// Implementations are bound to one graph (and configuration) at construction
/// and are pure: no interior state, safe to share across threads.
pub trait Algorithm: Send + Sync {
    fn kind(&self) -> AlgoKind;

    fn graph(&self) -> &Graph;

    /// Hop radius of the entries of a [`View`] the guards and actions may read.
    fn read_radius(&self) -> usize;

    /// The guard: is the reader impedensable in this view?
    fn impedensable(&self, view: &View<'_>) -> bool;

    /// Every admissible result of the action, ordered by the id of the node
    /// the choice is about. Errors when the reader is not impedensable.
    fn actions(&self, view: &View<'_>) -> Result<Vec<LocalState>, ModelError>;

    /// The smallest-id candidate of [`Algorithm::actions`].
    fn deterministic_action(&self, view: &View<'_>) -> Result<LocalState, ModelError> {
        self.actions(view)?
            .into_iter()
            .next()
            .ok_or(ModelError::NotImpedensable { node: view.reader })
    }

    /// Per-node progress measure, evaluated on true states.
    fn state_value(&self, node: NodeId, state: &GlobalState) -> ExtValue;

    /// Problem predicate.
    fn optimal(&self, state: &GlobalState) -> bool;

    fn default_init(&self) -> GlobalState;

    /// Every local state node `node` may hold.
    fn local_domain(&self, node: NodeId) -> Vec<LocalState>;

    /// Domain constraint on a single component.
    fn check_local(&self, node: NodeId, local: &LocalState) -> Result<(), ModelError>;

    /// Fixed destination, for algorithms that have one.
    fn destination(&self) -> Option<NodeId> {
        None
    }
}

/// Sum of state values; infinite if any summand is.
pub fn rank(algo: &dyn Algorithm, state: &GlobalState) -> ExtValue {
    algo.graph().nodes().map(|i| algo.state_value(i, state)).sum()
}

/// Nodes whose guard holds on fresh values.
pub fn enabled_nodes(algo: &dyn Algorithm, state: &GlobalState) -> Vec<NodeId> {
    algo.graph().nodes().filter(|&i| algo.impedensable(&View::fresh(state, i))).collect()
}

/// Checks length, tag and every component's domain constraint.
pub fn check_state(algo: &dyn Algorithm, state: &GlobalState) -> Result<(), ModelError> {
    if state.kind() != algo.kind() {
        return Err(ModelError::WrongAlgorithm { expected: algo.kind(), found: state.kind() });
    }
    if state.len() != algo.graph().n() {
        return Err(ModelError::LengthMismatch { expected: algo.graph().n(), found: state.len() });
    }
    for i in algo.graph().nodes() {
        algo.check_local(i, &state[i])?;
    }
    Ok(())
}

/// Replaces component `node`, leaving every other component unchanged.
pub fn apply_move(
    algo: &dyn Algorithm,
    state: &GlobalState,
    node: NodeId,
    new_local: LocalState,
) -> Result<GlobalState, ModelError> {
    if new_local.kind() != algo.kind() {
        return Err(ModelError::WrongAlgorithm { expected: algo.kind(), found: new_local.kind() });
    }
    algo.check_local(node, &new_local)?;
    Ok(state.with_local(node, new_local))
}

/// Builds a global state from explicit components, validating each one.
pub fn state_from_locals(algo: &dyn Algorithm, locals: Vec<LocalState>) -> Result<GlobalState, ModelError> {
    let state = GlobalState::new(algo.kind(), locals)?;
    check_state(algo, &state)?;
    Ok(state)
}

/// Every combination of per-node domain values, in mixed-radix order.
pub fn domain_product(algo: &dyn Algorithm) -> DomainProduct {
    let domains: Vec<Vec<LocalState>> = algo.graph().nodes().map(|i| algo.local_domain(i)).collect();
    DomainProduct { kind: algo.kind(), digits: vec![0; domains.len()], done: domains.iter().any(Vec::is_empty), domains }
}

pub struct DomainProduct {
    kind: AlgoKind,
    domains: Vec<Vec<LocalState>>,
    digits: Vec<usize>,
    done: bool,
}

impl DomainProduct {
    /// Number of states the product enumerates (saturating).
    pub fn size(&self) -> u128 {
        self.domains.iter().fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }
}

impl Iterator for DomainProduct {
    type Item = GlobalState;

    fn next(&mut self) -> Option<GlobalState> {
        if self.done {
            return None;
        }
        let states = self.digits.iter().zip(&self.domains).map(|(&k, d)| d[k].clone()).collect();
        let mut pos = 0;
        loop {
            if pos == self.digits.len() {
                self.done = true;
                break;
            }
            self.digits[pos] += 1;
            if self.digits[pos] < self.domains[pos].len() {
                break;
            }
            self.digits[pos] = 0;
            pos += 1;
        }
        Some(GlobalState { kind: self.kind, states })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_local(kind: AlgoKind, n: usize) -> BoxedStrategy<LocalState> {
        let slot = prop_oneof![Just(None), (0..n).prop_map(|k| Some(NodeId(k)))];
        match kind {
            AlgoKind::Dc => (0u64..(1u64 << n)).prop_map(|m| LocalState::Clique(NodeSet(m))).boxed(),
            AlgoKind::Sp => (slot, prop_oneof![Just(Dist::Infinite), (0u64..1000).prop_map(Dist::Finite)])
                .prop_map(|(parent, dist)| LocalState::Path { parent, dist })
                .boxed(),
            AlgoKind::Mm => slot.prop_map(LocalState::Match).boxed(),
        }
    }

    fn arb_global() -> impl Strategy<Value = GlobalState> {
        (prop_oneof![Just(AlgoKind::Dc), Just(AlgoKind::Sp), Just(AlgoKind::Mm)], 1usize..12).prop_flat_map(
            |(kind, n)| proptest::collection::vec(arb_local(kind, n), n).prop_map(move |s| GlobalState { kind, states: s }),
        )
    }

    proptest! {
        #[test]
        fn encoding_round_trips(s in arb_global()) {
            let bytes = s.encode();
            prop_assert_eq!(GlobalState::decode(&bytes).unwrap(), s);
        }

        #[test]
        fn encoding_is_injective(a in arb_global(), b in arb_global()) {
            prop_assert_eq!(a == b, a.encode() == b.encode());
        }

        #[test]
        fn json_round_trips(s in arb_global()) {
            for local in s.states() {
                let text = serde_json::to_string(local).unwrap();
                let back: LocalState = serde_json::from_str(&text).unwrap();
                prop_assert_eq!(&back, local);
            }
        }
    }

    #[test]
    fn local_json_shapes() {
        let p = LocalState::Path { parent: None, dist: Dist::Infinite };
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"p":"T","d":"inf"}"#);
        let m = LocalState::Match(Some(NodeId(3)));
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"match":4}"#);
        let c = LocalState::Clique(NodeSet::from_iter([NodeId(0), NodeId(1)]));
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"cliq":[1,2]}"#);
        assert!(serde_json::from_str::<LocalState>(r#"{"match":0}"#).is_err());
        assert!(serde_json::from_str::<LocalState>(r#"{"match":"X"}"#).is_err());
    }

    #[test]
    fn ext_value_arithmetic() {
        assert_eq!(ExtValue::Finite(2) + ExtValue::Finite(3), ExtValue::Finite(5));
        assert_eq!(ExtValue::Finite(2) + ExtValue::Infinite, ExtValue::Infinite);
        assert!(ExtValue::Finite(i64::MAX) < ExtValue::Infinite);
        let total: ExtValue = [ExtValue::Finite(1), ExtValue::Finite(-4)].into_iter().sum();
        assert_eq!(total, ExtValue::Finite(-3));
    }

    #[test]
    fn node_set_ops() {
        let s = NodeSet::from_iter([NodeId(0), NodeId(2)]);
        assert_eq!(s.len(), 2);
        assert!(s.contains(NodeId(2)) && !s.contains(NodeId(1)));
        assert_eq!(s.iter().collect::<Vec<_>>(), [NodeId(0), NodeId(2)]);
        assert!(NodeSet::singleton(NodeId(2)).is_subset(s));
        assert_eq!(s.to_string(), "{1,3}");
    }

    #[test]
    fn display_uses_angle_brackets() {
        let s = GlobalState::new(
            AlgoKind::Mm,
            vec![LocalState::Match(Some(NodeId(3))), LocalState::Match(None)],
        )
        .unwrap();
        assert_eq!(s.to_string(), "⟨v4,⊤⟩");
        assert!(GlobalState::new(AlgoKind::Dc, vec![LocalState::Match(None)]).is_err());
    }
}
