//! Scheduler and asynchrony simulation.
//!
//! A [`Run`] owns the true global state, the observation channels and a
//! seeded PRNG. Each [`Run::step`] lets the scheduler pick node(s), builds
//! their views according to the [`AsyncModel`], evaluates guards and applies
//! [`Algorithm::deterministic_action`].

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::graph::NodeId;
use crate::model::trace::Trace;
use crate::model::{
    decode_local, enabled_nodes, encode_local, rank, write_varint, AlgoKind, Algorithm, Cursor, GlobalState, LocalState,
    ModelError, View,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulerKind {
    Central,
    Distributed,
    Synchronous,
}

impl FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "central" => Ok(SchedulerKind::Central),
            "distributed" => Ok(SchedulerKind::Distributed),
            "synchronous" => Ok(SchedulerKind::Synchronous),
            other => Err(format!("unknown scheduler `{other}`")),
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchedulerKind::Central => "central",
            SchedulerKind::Distributed => "distributed",
            SchedulerKind::Synchronous => "synchronous",
        })
    }
}

/// How the scheduler orders candidate nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodePolicy {
    /// Seeded shuffles and coin flips.
    Random,
    /// Round-robin from the node after the last one that moved.
    FixedOrder,
}

impl FromStr for NodePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(NodePolicy::Random),
            "fixed" | "fixed-order" => Ok(NodePolicy::FixedOrder),
            other => Err(format!("unknown node policy `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum AsyncModel {
    /// Every read sees the current value.
    Fresh,
    /// Per-channel FIFO of at most `channel_bound` undelivered publications.
    Amr { channel_bound: usize },
    /// A read may return any of the last `window` publications of the source.
    Aa { window: usize },
}

impl fmt::Display for AsyncModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AsyncModel::Fresh => f.write_str("fresh"),
            AsyncModel::Amr { channel_bound } => write!(f, "amr{channel_bound}"),
            AsyncModel::Aa { window } => write!(f, "aa{window}"),
        }
    }
}

/// Observation channels `source → reader` for every source within the
/// reader's read radius.
#[derive(Clone, Debug)]
pub struct Topology {
    channels: Vec<(NodeId, NodeId)>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
}

impl Topology {
    pub fn new(algo: &dyn Algorithm) -> Self {
        let g = algo.graph();
        let mut channels = Vec::new();
        let mut incoming = vec![Vec::new(); g.n()];
        let mut outgoing = vec![Vec::new(); g.n()];
        for reader in g.nodes() {
            for source in g.adj_within(reader, algo.read_radius()) {
                incoming[reader.0].push(channels.len());
                outgoing[source.0].push(channels.len());
                channels.push((source, reader));
            }
        }
        Topology { channels, incoming, outgoing }
    }

    pub fn channels(&self) -> &[(NodeId, NodeId)] {
        &self.channels
    }

    /// Channel indices read by `reader`.
    pub fn incoming(&self, reader: NodeId) -> &[usize] {
        &self.incoming[reader.0]
    }

    /// Nodes `reader` can observe, in channel order.
    pub fn sources(&self, reader: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.incoming[reader.0].iter().map(|&c| self.channels[c].0)
    }
}

/// AMR channel: the value the reader currently sees and the publications
/// still in flight, oldest first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Channel {
    pub last: LocalState,
    pub queue: VecDeque<LocalState>,
}

/// What readers may know about other nodes beyond the true state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ChannelBank {
    Fresh,
    Amr { bound: usize, channels: Vec<Channel> },
    /// Last `window` publications per source, newest last.
    Aa { window: usize, recent: Vec<VecDeque<LocalState>> },
}

impl ChannelBank {
    /// Channels in sync with `state`: nothing in flight, no stale history.
    pub fn new(model: AsyncModel, topo: &Topology, state: &GlobalState) -> Self {
        match model {
            AsyncModel::Fresh => ChannelBank::Fresh,
            AsyncModel::Amr { channel_bound } => ChannelBank::Amr {
                bound: channel_bound.max(1),
                channels: topo
                    .channels
                    .iter()
                    .map(|&(src, _)| Channel { last: state[src].clone(), queue: VecDeque::new() })
                    .collect(),
            },
            AsyncModel::Aa { window } => ChannelBank::Aa {
                window: window.max(1),
                recent: state.states().iter().map(|s| VecDeque::from([s.clone()])).collect(),
            },
        }
    }

    /// Records a new value of `source`. AMR channels that are full first
    /// deliver their oldest entry; those deliveries are returned.
    pub fn publish(&mut self, topo: &Topology, source: NodeId, value: &LocalState) -> Vec<(usize, LocalState)> {
        let mut forced = Vec::new();
        match self {
            ChannelBank::Fresh => {}
            ChannelBank::Amr { bound, channels } => {
                for &c in &topo.outgoing[source.0] {
                    let ch = &mut channels[c];
                    if ch.queue.len() >= *bound {
                        let oldest = ch.queue.pop_front().expect("full queue");
                        ch.last = oldest.clone();
                        forced.push((c, oldest));
                    }
                    ch.queue.push_back(value.clone());
                }
            }
            ChannelBank::Aa { window, recent } => {
                let hist = &mut recent[source.0];
                hist.push_back(value.clone());
                while hist.len() > *window {
                    hist.pop_front();
                }
            }
        }
        forced
    }

    /// Delivers the oldest in-flight value of AMR channel `c`.
    pub fn deliver(&mut self, c: usize) -> Option<LocalState> {
        let ChannelBank::Amr { channels, .. } = self else { return None };
        let ch = &mut channels[c];
        let v = ch.queue.pop_front()?;
        ch.last = v.clone();
        Some(v)
    }

    /// AMR channels with something in flight.
    pub fn pending(&self) -> Vec<usize> {
        match self {
            ChannelBank::Amr { channels, .. } => {
                channels.iter().enumerate().filter(|(_, ch)| !ch.queue.is_empty()).map(|(c, _)| c).collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn amr_channel(&self, c: usize) -> Option<&Channel> {
        match self {
            ChannelBank::Amr { channels, .. } => channels.get(c),
            _ => None,
        }
    }

    /// AA window of `source`, oldest first.
    pub fn window(&self, source: NodeId) -> Option<&VecDeque<LocalState>> {
        match self {
            ChannelBank::Aa { recent, .. } => recent.get(source.0),
            _ => None,
        }
    }

    /// The reader's view under fresh or AMR semantics. AA views involve a
    /// choice per source; see [`ChannelBank::aa_choices`].
    pub fn view_of(&self, topo: &Topology, state: &GlobalState, reader: NodeId) -> Vec<LocalState> {
        let mut observed = state.states().to_vec();
        if let ChannelBank::Amr { channels, .. } = self {
            for &c in topo.incoming(reader) {
                observed[topo.channels[c].0 .0] = channels[c].last.clone();
            }
        }
        observed
    }

    /// For each source `reader` observes: the distinct values it may read,
    /// newest first.
    pub fn aa_choices(&self, topo: &Topology, reader: NodeId) -> Vec<(NodeId, Vec<LocalState>)> {
        let ChannelBank::Aa { recent, .. } = self else { return Vec::new() };
        topo.sources(reader)
            .map(|src| {
                let mut vals: Vec<LocalState> = Vec::new();
                for v in recent[src.0].iter().rev() {
                    if !vals.contains(v) {
                        vals.push(v.clone());
                    }
                }
                (src, vals)
            })
            .collect()
    }

    /// Appends a canonical encoding; `n` fixes the slot width.
    pub fn encode_into(&self, n: usize, out: &mut Vec<u8>) {
        match self {
            ChannelBank::Fresh => out.push(0),
            ChannelBank::Amr { channels, .. } => {
                out.push(1);
                for ch in channels {
                    encode_local(&ch.last, n, out);
                    write_varint(out, ch.queue.len() as u64);
                    for v in &ch.queue {
                        encode_local(v, n, out);
                    }
                }
            }
            ChannelBank::Aa { recent, .. } => {
                out.push(2);
                for hist in recent {
                    write_varint(out, hist.len() as u64);
                    for v in hist {
                        encode_local(v, n, out);
                    }
                }
            }
        }
    }
}

impl ChannelBank {
    /// Inverse of [`ChannelBank::encode_into`] for the given model and topology.
    pub fn decode(model: AsyncModel, topo: &Topology, kind: AlgoKind, n: usize, bytes: &[u8]) -> Result<Self, ModelError> {
        let mut cur = Cursor { bytes, pos: 0 };
        let bank = match (model, cur.byte()?) {
            (AsyncModel::Fresh, 0) => ChannelBank::Fresh,
            (AsyncModel::Amr { channel_bound }, 1) => {
                let mut channels = Vec::with_capacity(topo.channels.len());
                for _ in &topo.channels {
                    let last = decode_local(kind, n, &mut cur)?;
                    let len = cur.varint()? as usize;
                    let queue = (0..len).map(|_| decode_local(kind, n, &mut cur)).collect::<Result<_, _>>()?;
                    channels.push(Channel { last, queue });
                }
                ChannelBank::Amr { bound: channel_bound.max(1), channels }
            }
            (AsyncModel::Aa { window }, 2) => {
                let mut recent = Vec::with_capacity(n);
                for _ in 0..n {
                    let len = cur.varint()? as usize;
                    recent.push((0..len).map(|_| decode_local(kind, n, &mut cur)).collect::<Result<_, _>>()?);
                }
                ChannelBank::Aa { window: window.max(1), recent }
            }
            _ => return Err(ModelError::Decode("channel bank does not match the model".into())),
        };
        if cur.pos != bytes.len() {
            return Err(ModelError::Decode("trailing bytes after channel bank".into()));
        }
        Ok(bank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub scheduler: SchedulerKind,
    pub policy: NodePolicy,
    pub model: AsyncModel,
    pub seed: u64,
    pub max_moves: u64,
    /// Guards stale-view stutter loops; counts steps with or without moves.
    pub max_steps: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scheduler: SchedulerKind::Central,
            policy: NodePolicy::Random,
            model: AsyncModel::Fresh,
            seed: 0,
            max_moves: 100_000,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunVerdict {
    Converged,
    MoveBudgetExhausted,
    StepBudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub verdict: RunVerdict,
    pub final_state: GlobalState,
    pub trace: Trace,
    pub steps: u64,
}

/// One simulated execution.
pub struct Run<'a> {
    algo: &'a dyn Algorithm,
    cfg: RunConfig,
    topo: Topology,
    state: GlobalState,
    bank: ChannelBank,
    rng: SplitMix64,
    trace: Trace,
    step: u64,
    cursor: usize,
}

impl<'a> Run<'a> {
    pub fn new(algo: &'a dyn Algorithm, cfg: RunConfig, init: GlobalState) -> Self {
        let topo = Topology::new(algo);
        let bank = ChannelBank::new(cfg.model, &topo, &init);
        let n = algo.graph().n();
        Run {
            algo,
            rng: SplitMix64::seed_from_u64(cfg.seed),
            cfg,
            topo,
            state: init,
            bank,
            trace: Trace::new(n),
            step: 0,
            cursor: 0,
        }
    }

    pub fn state(&self) -> &GlobalState {
        &self.state
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn bank(&self) -> &ChannelBank {
        &self.bank
    }

    /// No node enabled on true values.
    pub fn converged(&self) -> bool {
        enabled_nodes(self.algo, &self.state).is_empty()
    }

    /// Builds `reader`'s view, performing AMR deliveries and AA choices.
    fn observe(&mut self, reader: NodeId) -> Vec<LocalState> {
        match self.cfg.model {
            AsyncModel::Fresh => self.state.states().to_vec(),
            AsyncModel::Amr { .. } => {
                for c in self.topo.incoming(reader).to_vec() {
                    let waiting = self.bank.amr_channel(c).map_or(0, |ch| ch.queue.len());
                    let k = self.rng.random_range(0..=waiting);
                    for _ in 0..k {
                        let v = self.bank.deliver(c).expect("queued");
                        self.trace.delivered(self.step, self.topo.channels[c].0, reader, v);
                    }
                }
                self.bank.view_of(&self.topo, &self.state, reader)
            }
            AsyncModel::Aa { .. } => {
                let mut observed = self.state.states().to_vec();
                for (src, vals) in self.bank.aa_choices(&self.topo, reader) {
                    let pick = vals[self.rng.random_range(0..vals.len())].clone();
                    if pick != self.state[src] {
                        self.trace.delivered(self.step, src, reader, pick.clone());
                    }
                    observed[src.0] = pick;
                }
                observed
            }
        }
    }

    /// Evaluates `node` on a fresh view of the model; returns its move if enabled.
    fn evaluate(&mut self, node: NodeId) -> Option<LocalState> {
        let observed = self.observe(node);
        let view = View { reader: node, observed: &observed };
        if self.algo.impedensable(&view) {
            Some(self.algo.deterministic_action(&view).expect("impedensable node has an action"))
        } else {
            None
        }
    }

    fn commit(&mut self, node: NodeId, post: LocalState) {
        let pre = std::mem::replace(&mut self.state.states_mut()[node.0], post.clone());
        for (c, v) in self.bank.publish(&self.topo, node, &post) {
            self.trace.delivered(self.step, node, self.topo.channels[c].1, v);
        }
        self.trace.moved(self.step, node, pre, post);
    }

    fn order(&mut self) -> Vec<NodeId> {
        let n = self.algo.graph().n();
        match self.cfg.policy {
            NodePolicy::FixedOrder => (0..n).map(|k| NodeId((self.cursor + k) % n)).collect(),
            NodePolicy::Random => {
                let mut order: Vec<NodeId> = self.algo.graph().nodes().collect();
                order.shuffle(&mut self.rng);
                order
            }
        }
    }

    /// One scheduler step. Returns the number of moves made.
    pub fn step(&mut self) -> usize {
        self.step += 1;
        let before = self.trace.moves();
        match self.cfg.scheduler {
            SchedulerKind::Central => {
                for node in self.order() {
                    let action = self.evaluate(node);
                    self.trace.guard_eval(self.step, node, action.is_some());
                    if let Some(post) = action {
                        self.commit(node, post);
                        self.cursor = node.0 + 1;
                        self.trace.close_round_if_complete(self.step);
                        break;
                    }
                    self.trace.close_round_if_complete(self.step);
                }
            }
            SchedulerKind::Distributed | SchedulerKind::Synchronous => {
                let order = self.order();
                let mut enabled = Vec::new();
                let mut disabled = Vec::new();
                for &node in &order {
                    match self.evaluate(node) {
                        Some(post) => enabled.push((node, post)),
                        None => disabled.push(node),
                    }
                }
                let chosen = if self.cfg.scheduler == SchedulerKind::Synchronous {
                    enabled
                } else {
                    self.choose_subset(enabled)
                };
                let mut evaluated: Vec<(NodeId, bool)> =
                    chosen.iter().map(|(i, _)| (*i, true)).chain(disabled.into_iter().map(|i| (i, false))).collect();
                evaluated.sort();
                for (node, verdict) in evaluated {
                    self.trace.guard_eval(self.step, node, verdict);
                }
                let mut chosen = chosen;
                chosen.sort_by_key(|(i, _)| *i);
                if let Some((last, _)) = chosen.last() {
                    self.cursor = last.0 + 1;
                }
                for (node, post) in chosen {
                    self.commit(node, post);
                }
                self.trace.close_round_if_complete(self.step);
            }
        }
        let moved = (self.trace.moves() - before) as usize;
        if moved > 0 {
            self.trace.ranked(self.step, rank(self.algo, &self.state));
        }
        moved
    }

    /// Nonempty subset of the enabled nodes.
    fn choose_subset(&mut self, enabled: Vec<(NodeId, LocalState)>) -> Vec<(NodeId, LocalState)> {
        if enabled.is_empty() {
            return enabled;
        }
        match self.cfg.policy {
            NodePolicy::FixedOrder => {
                let keep = enabled.len().div_ceil(2);
                enabled.into_iter().take(keep).collect()
            }
            NodePolicy::Random => loop {
                let flips: Vec<bool> = enabled.iter().map(|_| self.rng.random_bool(0.5)).collect();
                if flips.iter().any(|&b| b) {
                    break enabled.into_iter().zip(flips).filter(|(_, b)| *b).map(|(e, _)| e).collect();
                }
            },
        }
    }

    /// Steps until converged on true values or a budget runs out.
    pub fn run(mut self) -> RunOutcome {
        let verdict = loop {
            if self.converged() {
                break RunVerdict::Converged;
            }
            if self.trace.moves() >= self.cfg.max_moves {
                break RunVerdict::MoveBudgetExhausted;
            }
            if self.step >= self.cfg.max_steps {
                break RunVerdict::StepBudgetExhausted;
            }
            self.step();
        };
        RunOutcome { verdict, final_state: self.state, trace: self.trace, steps: self.step }
    }
}

/// Convenience wrapper around [`Run`].
pub fn run(algo: &dyn Algorithm, cfg: RunConfig, init: GlobalState) -> RunOutcome {
    Run::new(algo, cfg, init).run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::testutil::v;
    use crate::algo::{DominantClique, MaximalMatching, ShortestPath};
    use crate::graph::{fig1, fig3, fig4, generate, Family};
    use crate::model::trace::Event;
    use crate::model::ExtValue;
    use proptest::prelude::*;

    fn cfg(scheduler: SchedulerKind, model: AsyncModel, seed: u64) -> RunConfig {
        RunConfig { scheduler, model, seed, ..RunConfig::default() }
    }

    #[test]
    fn star_matching_central_fresh() {
        let mm = MaximalMatching::new(fig4()).unwrap();
        for seed in 0..20 {
            let mut r = Run::new(&mm, cfg(SchedulerKind::Central, AsyncModel::Fresh, seed), mm.default_init());
            r.step();
            let first = r.trace().events().iter().find_map(|e| match e {
                Event::Move { node, .. } => Some(*node),
                _ => None,
            });
            assert_eq!(first, Some(v(4)));
            let out = r.run();
            assert_eq!(out.verdict, RunVerdict::Converged);
            assert_eq!(out.trace.moves(), 2);
            let ranks: Vec<ExtValue> = out
                .trace
                .events()
                .iter()
                .filter_map(|e| if let Event::Rank { rank, .. } = e { Some(*rank) } else { None })
                .collect();
            assert_eq!(ranks, [ExtValue::Finite(1), ExtValue::Finite(0)]);
        }
    }

    #[test]
    fn shortest_path_synchronous_first_step() {
        let sp = ShortestPath::new(fig3(), Some(v(4))).unwrap();
        let mut r = Run::new(&sp, cfg(SchedulerKind::Synchronous, AsyncModel::Fresh, 0), sp.default_init());
        assert_eq!(r.step(), 1);
        assert_eq!(r.state()[v(4)], LocalState::Path { parent: Some(v(4)), dist: crate::graph::Dist::Finite(0) });
        let out = r.run();
        assert!(sp.optimal(&out.final_state));
    }

    #[test]
    fn zero_distance_init_is_silent_but_wrong() {
        let sp = ShortestPath::new(fig3(), Some(v(4))).unwrap();
        let out = run(&sp, RunConfig::default(), sp.zero_init());
        assert_eq!(out.verdict, RunVerdict::Converged);
        assert_eq!(out.trace.moves(), 0);
        assert!(!sp.optimal(&out.final_state));
    }

    #[test]
    fn dominant_clique_reaches_an_optimal_sink() {
        let dc = DominantClique::new(fig1()).unwrap();
        let sinks = ["⟨{1,2},{1,2},{1,3}⟩", "⟨{1,3},{1,2},{1,3}⟩"];
        for sched in [SchedulerKind::Central, SchedulerKind::Distributed, SchedulerKind::Synchronous] {
            for seed in 0..10 {
                let out = run(&dc, cfg(sched, AsyncModel::Fresh, seed), dc.default_init());
                assert!(sinks.contains(&out.final_state.to_string().as_str()));
            }
        }
    }

    #[test]
    fn converged_step_is_a_stutter() {
        let mm = MaximalMatching::new(fig4()).unwrap();
        let done = run(&mm, RunConfig::default(), mm.default_init()).final_state;
        let mut r = Run::new(&mm, RunConfig::default(), done.clone());
        assert_eq!(r.step(), 0);
        assert_eq!(r.state(), &done);
    }

    fn trace_json(out: &RunOutcome) -> String {
        out.trace.events().iter().map(|e| serde_json::to_string(e).unwrap() + "\n").collect()
    }

    /// Publications of every node, reconstructed from the trace.
    fn publications(init: &GlobalState, events: &[Event]) -> Vec<Vec<LocalState>> {
        let mut pubs: Vec<Vec<LocalState>> = init.states().iter().map(|s| vec![s.clone()]).collect();
        for e in events {
            if let Event::Move { node, post, .. } = e {
                pubs[node.0].push(post.clone());
            }
        }
        pubs
    }

    fn algos(seed: u64) -> Vec<Box<dyn Algorithm>> {
        let g = generate(Family::Gnp { p: 0.5 }, 7, Some(seed)).unwrap();
        let mut out: Vec<Box<dyn Algorithm>> =
            vec![Box::new(MaximalMatching::new(g.clone()).unwrap()), Box::new(DominantClique::new(g.clone()).unwrap())];
        if g.is_connected() {
            out.push(Box::new(ShortestPath::new(g, Some(NodeId(0))).unwrap()));
        }
        out
    }

    fn scheduler_strategy() -> impl Strategy<Value = SchedulerKind> {
        prop_oneof![Just(SchedulerKind::Central), Just(SchedulerKind::Distributed), Just(SchedulerKind::Synchronous)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn identical_seeds_give_identical_traces(seed in 0u64..500, sched in scheduler_strategy(), bound in 1usize..3) {
            for algo in algos(seed) {
                for model in [AsyncModel::Fresh, AsyncModel::Amr { channel_bound: bound }, AsyncModel::Aa { window: bound + 1 }] {
                    let a = run(algo.as_ref(), cfg(sched, model, seed), algo.default_init());
                    let b = run(algo.as_ref(), cfg(sched, model, seed), algo.default_init());
                    prop_assert_eq!(trace_json(&a), trace_json(&b));
                }
            }
        }

        #[test]
        fn amr_deliveries_replay_publications_in_order(seed in 0u64..500, sched in scheduler_strategy(), bound in 1usize..4) {
            for algo in algos(seed) {
                let init = algo.default_init();
                let out = run(algo.as_ref(), cfg(sched, AsyncModel::Amr { channel_bound: bound }, seed), init.clone());
                let pubs = publications(&init, out.trace.events());
                let mut delivered: std::collections::HashMap<(NodeId, NodeId), usize> = Default::default();
                for e in out.trace.events() {
                    if let Event::Delivery { source, reader, value, .. } = e {
                        let k = delivered.entry((*source, *reader)).or_insert(0);
                        *k += 1;
                        prop_assert_eq!(&pubs[source.0][*k], value);
                    }
                }
            }
        }

        #[test]
        fn aa_reads_come_from_history(seed in 0u64..500, sched in scheduler_strategy(), window in 1usize..4) {
            for algo in algos(seed) {
                let init = algo.default_init();
                let out = run(algo.as_ref(), cfg(sched, AsyncModel::Aa { window }, seed), init.clone());
                let mut pubs: Vec<Vec<LocalState>> = init.states().iter().map(|s| vec![s.clone()]).collect();
                for e in out.trace.events() {
                    match e {
                        Event::Move { node, post, .. } => pubs[node.0].push(post.clone()),
                        Event::Delivery { source, value, .. } => {
                            let hist = &pubs[source.0];
                            prop_assert!(hist[hist.len().saturating_sub(window)..].contains(value));
                        }
                        _ => {}
                    }
                }
            }
        }

        #[test]
        fn fresh_rank_strictly_decreases(seed in 0u64..500, sched in scheduler_strategy()) {
            for algo in algos(seed) {
                let init = algo.default_init();
                let out = run(algo.as_ref(), cfg(sched, AsyncModel::Fresh, seed), init.clone());
                prop_assert_eq!(out.verdict, RunVerdict::Converged);
                let mut last = rank(algo.as_ref(), &init);
                for e in out.trace.events() {
                    if let Event::Rank { rank, .. } = e {
                        prop_assert!(*rank < last || (last == ExtValue::Infinite && *rank == ExtValue::Infinite));
                        last = *rank;
                    }
                }
                let moves = out.trace.events().iter().filter(|e| matches!(e, Event::Move { .. })).count() as u64;
                prop_assert_eq!(moves, out.trace.moves());
            }
        }

        #[test]
        fn views_read_own_state_fresh(seed in 0u64..500, bound in 1usize..3) {
            for algo in algos(seed) {
                for model in [AsyncModel::Amr { channel_bound: bound }, AsyncModel::Aa { window: bound + 1 }] {
                    let mut r = Run::new(algo.as_ref(), cfg(SchedulerKind::Central, model, seed), algo.default_init());
                    for _ in 0..30 {
                        r.step();
                        for i in algo.graph().nodes() {
                            let observed = r.observe(i);
                            prop_assert_eq!(&observed[i.0], &r.state()[i]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rounds_close_when_every_node_evaluated() {
        let mm = MaximalMatching::new(generate(Family::Path, 5, None).unwrap()).unwrap();
        let out = run(&mm, cfg(SchedulerKind::Synchronous, AsyncModel::Fresh, 3), mm.default_init());
        let boundaries = out.trace.events().iter().filter(|e| matches!(e, Event::RoundBoundary { .. })).count();
        assert_eq!(boundaries as u64, out.trace.rounds());
        assert_eq!(out.trace.rounds(), out.steps);
    }
}
