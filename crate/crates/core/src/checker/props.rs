//! Properties checked on an explored system.

use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::checker::explore::{EdgeLabel, TransitionSystem};
use crate::checker::verdict::{bfs_parents, path_to, Counterexample, Expectation, PropertyVerdict};
use crate::graph::{Dist, NodeId};
use crate::model::{domain_product, enabled_nodes, rank, Algorithm, ExtValue, GlobalState, LocalState};

/// Per-state facts about the global-state projection, on fresh values.
#[derive(Clone, Debug)]
pub struct Annotations {
    pub rank: Vec<ExtValue>,
    pub optimal: Vec<bool>,
    /// Bitmask of nodes impedensable on fresh values.
    pub enabled: Vec<u64>,
}

pub fn annotate(ts: &TransitionSystem, algo: &dyn Algorithm) -> Annotations {
    let rows: Vec<(ExtValue, bool, u64)> = (0..ts.len())
        .into_par_iter()
        .map(|id| {
            let s = ts.global(id);
            let enabled = enabled_nodes(algo, &s).iter().fold(0u64, |m, v| m | 1 << v.0);
            (rank(algo, &s), algo.optimal(&s), enabled)
        })
        .collect();
    Annotations {
        rank: rows.iter().map(|r| r.0).collect(),
        optimal: rows.iter().map(|r| r.1).collect(),
        enabled: rows.iter().map(|r| r.2).collect(),
    }
}

/// Outcome of the two independent cycle checks.
#[derive(Clone, Debug)]
pub struct Acyclicity {
    /// Depth-first search found no back edge.
    pub dfs_acyclic: bool,
    /// Kahn's algorithm ordered every state.
    pub kahn_acyclic: bool,
    /// States in topological order when Kahn succeeded.
    pub order: Option<Vec<usize>>,
    /// `(path to the cycle, index where the cycle starts)`.
    pub cycle: Option<(Vec<usize>, usize)>,
}

impl Acyclicity {
    pub fn acyclic(&self) -> bool {
        self.dfs_acyclic && self.kahn_acyclic
    }

    pub fn verdict(&self, ts: &TransitionSystem, expected: Expectation) -> PropertyVerdict {
        let agree = self.dfs_acyclic == self.kahn_acyclic;
        let detail = if !agree {
            format!("methods disagree: dfs={} kahn={}", self.dfs_acyclic, self.kahn_acyclic)
        } else if self.acyclic() {
            format!("{} states, {} edges, no cycle (dfs and topological sort agree)", ts.len(), ts.edge_count())
        } else {
            "cycle found (dfs and topological sort agree)".to_string()
        };
        let cex = self.cycle.as_ref().map(|(p, c)| Counterexample::new(ts, p.clone(), Some(*c), "cycle"));
        PropertyVerdict::new("acyclic", expected, agree && self.acyclic(), detail).with_counterexample(cex)
    }
}

/// Iterative depth-first search returning the first back edge as a cycle.
fn dfs_cycle(ts: &TransitionSystem) -> Option<(usize, Vec<usize>)> {
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let mut color = vec![WHITE; ts.len()];
    let roots = ts.initial().iter().copied().chain(0..ts.len());
    for root in roots {
        if color[root] != WHITE {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(root, ts.successors(root).map(|e| e.0).collect(), 0)];
        color[root] = GRAY;
        while let Some((node, succ, pos)) = stack.last_mut() {
            if *pos == succ.len() {
                color[*node] = BLACK;
                stack.pop();
                continue;
            }
            let t = succ[*pos];
            *pos += 1;
            match color[t] {
                WHITE => {
                    color[t] = GRAY;
                    let next = ts.successors(t).map(|e| e.0).collect();
                    stack.push((t, next, 0));
                }
                GRAY => {
                    let start = stack.iter().position(|f| f.0 == t).expect("gray node on stack");
                    let mut cycle: Vec<usize> = stack[start..].iter().map(|f| f.0).collect();
                    cycle.push(t);
                    return Some((t, cycle));
                }
                _ => {}
            }
        }
    }
    None
}

fn kahn(ts: &TransitionSystem) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; ts.len()];
    for (_, t, _) in ts.edges() {
        indeg[t] += 1;
    }
    let mut queue: VecDeque<usize> = (0..ts.len()).filter(|&s| indeg[s] == 0).collect();
    let mut order = Vec::with_capacity(ts.len());
    while let Some(s) = queue.pop_front() {
        order.push(s);
        for (t, _) in ts.successors(s) {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push_back(t);
            }
        }
    }
    (order.len() == ts.len()).then_some(order)
}

pub fn check_acyclic(ts: &TransitionSystem) -> Acyclicity {
    let dfs = dfs_cycle(ts);
    let order = kahn(ts);
    let cycle = dfs.map(|(entry, cycle)| {
        let mut path = path_to(&bfs_parents(ts), entry);
        let start = path.len() - 1;
        path.extend_from_slice(&cycle[1..]);
        (path, start)
    });
    Acyclicity { dfs_acyclic: cycle.is_none(), kahn_acyclic: order.is_some(), order, cycle }
}

pub fn check_sinks_optimal(ts: &TransitionSystem, optimal: &[bool], expected: Expectation) -> PropertyVerdict {
    let sinks = ts.sinks();
    let bad: Vec<usize> = sinks.iter().copied().filter(|&s| !optimal[s]).collect();
    let detail = format!("{} sinks, {} suboptimal", sinks.len(), bad.len());
    let cex = bad.first().map(|&s| Counterexample::new(ts, path_to(&bfs_parents(ts), s), None, "suboptimal sink"));
    PropertyVerdict::new("all_sinks_optimal", expected, bad.is_empty(), detail).with_counterexample(cex)
}

/// Every move edge strictly lowers the rank; `∞ → ∞` is allowed.
pub fn check_rank_descent(ts: &TransitionSystem, ranks: &[ExtValue], expected: Expectation) -> PropertyVerdict {
    let bad = ts.edges().find(|&(s, t, l)| {
        l.mover().is_some() && !(ranks[t] < ranks[s] || ranks[s] == ExtValue::Infinite && ranks[t] == ExtValue::Infinite)
    });
    let detail = match bad {
        Some((s, t, _)) => format!("rank {} → {}", ranks[s], ranks[t]),
        None => "rank strictly decreases along every move".to_string(),
    };
    let cex = bad.map(|(s, t, _)| {
        let mut p = path_to(&bfs_parents(ts), s);
        p.push(t);
        Counterexample::new(ts, p, None, "rank does not decrease")
    });
    PropertyVerdict::new("rank_descent", expected, bad.is_none(), detail).with_counterexample(cex)
}

/// Which optimal states bullet (b) compares against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimalReference {
    /// Optimal states found by the exploration.
    Explored,
    /// Every optimal state of the per-node domain product.
    DomainProduct,
}

/// Node `node` is impedensable in explored state `state`, yet `optimal`
/// keeps its local state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistenceWitness {
    pub state: usize,
    pub node: NodeId,
    pub optimal: GlobalState,
}

#[derive(Clone, Debug)]
pub struct DagInducing {
    /// Suboptimal ⇒ some node impedensable.
    pub progress: PropertyVerdict,
    /// Impedensable ⇒ its local state appears in no optimal state.
    pub persistence: PropertyVerdict,
    pub witnesses: Vec<PersistenceWitness>,
    /// Optimal ⇒ no node impedensable.
    pub silence: PropertyVerdict,
}

pub fn check_dag_inducing(
    ts: &TransitionSystem,
    ann: &Annotations,
    algo: &dyn Algorithm,
    reference: OptimalReference,
    expect_persistence: Expectation,
) -> DagInducing {
    let parents = bfs_parents(ts);
    let stuck = (0..ts.len()).find(|&s| !ann.optimal[s] && ann.enabled[s] == 0);
    let progress = PropertyVerdict::new(
        "progress",
        Expectation::Pass,
        stuck.is_none(),
        match stuck {
            Some(s) => format!("suboptimal state {} has no impedensable node", ts.global(s)),
            None => "every suboptimal state has an impedensable node".into(),
        },
    )
    .with_counterexample(stuck.map(|s| Counterexample::new(ts, path_to(&parents, s), None, "no impedensable node")));

    let noisy = (0..ts.len()).find(|&s| ann.optimal[s] && ann.enabled[s] != 0);
    let silence = PropertyVerdict::new(
        "silence",
        Expectation::Pass,
        noisy.is_none(),
        match noisy {
            Some(s) => format!("optimal state {} has an impedensable node", ts.global(s)),
            None => "no node is impedensable in an optimal state".into(),
        },
    )
    .with_counterexample(noisy.map(|s| Counterexample::new(ts, path_to(&parents, s), None, "optimal but enabled")));

    let optima: Vec<GlobalState> = match reference {
        OptimalReference::Explored => (0..ts.len()).filter(|&s| ann.optimal[s]).map(|s| ts.global(s)).collect(),
        OptimalReference::DomainProduct => domain_product(algo).filter(|s| algo.optimal(s)).collect(),
    };
    let n = algo.graph().n();
    let mut by_local: Vec<HashMap<&LocalState, &GlobalState>> = vec![HashMap::new(); n];
    for o in &optima {
        for (i, l) in o.states().iter().enumerate() {
            by_local[i].entry(l).or_insert(o);
        }
    }
    let mut witnesses = Vec::new();
    for s in 0..ts.len() {
        if ann.enabled[s] == 0 {
            continue;
        }
        let g = ts.global(s);
        for (i, known) in by_local.iter().enumerate().take(n) {
            if ann.enabled[s] >> i & 1 == 1 {
                if let Some(o) = known.get(&g.states()[i]) {
                    witnesses.push(PersistenceWitness { state: s, node: NodeId(i), optimal: (*o).clone() });
                }
            }
        }
    }
    let detail = match witnesses.first() {
        Some(w) => format!(
            "{} keeps {} while impedensable in {}, as in optimal {} ({} witnesses, {} reference optima)",
            w.node,
            ts.global(w.state)[w.node],
            ts.global(w.state),
            w.optimal,
            witnesses.len(),
            optima.len()
        ),
        None => format!("checked against {} reference optima", optima.len()),
    };
    let cex = witnesses.first().map(|w| {
        Counterexample::new(ts, path_to(&parents, w.state), None, format!("{} impedensable; optimal {}", w.node, w.optimal))
    });
    let persistence =
        PropertyVerdict::new("persistence", expect_persistence, witnesses.is_empty(), detail).with_counterexample(cex);
    DagInducing { progress, persistence, witnesses, silence }
}

/// Along every path, no node's local state repeats.
///
/// For each node, moves project to a graph on its local states; if that
/// graph is acyclic no path can revisit. Otherwise every local state on a
/// cycle is searched exactly: is there an explored path that leaves it and
/// comes back?
pub fn check_partial_order(ts: &TransitionSystem, expected: Expectation) -> PropertyVerdict {
    let globals: Vec<GlobalState> = (0..ts.len()).into_par_iter().map(|id| ts.global(id)).collect();
    let n = globals.first().map_or(0, GlobalState::len);
    let parents = bfs_parents(ts);
    for i in 0..n {
        let mut local_edges: HashMap<&LocalState, HashSet<&LocalState>> = HashMap::new();
        for (s, t, l) in ts.edges() {
            if l != EdgeLabel::Move(NodeId(i)) {
                continue;
            }
            let (a, b) = (&globals[s].states()[i], &globals[t].states()[i]);
            if a == b {
                let mut p = path_to(&parents, s);
                p.push(t);
                return PropertyVerdict::new(
                    "local_partial_order",
                    expected,
                    false,
                    format!("{} moves without changing state {a}", NodeId(i)),
                )
                .with_counterexample(Some(Counterexample::new(ts, p, None, "move to the same local state")));
            }
            local_edges.entry(a).or_default().insert(b);
        }
        for x in on_cycles(&local_edges) {
            if let Some(path) = revisit_path(ts, &globals, &parents, i, x) {
                return PropertyVerdict::new(
                    "local_partial_order",
                    expected,
                    false,
                    format!("{} leaves {x} and returns to it", NodeId(i)),
                )
                .with_counterexample(Some(Counterexample::new(ts, path, None, "local state revisited")));
            }
        }
    }
    PropertyVerdict::new("local_partial_order", expected, true, "no node revisits a local state on any path")
}

/// Vertices of `graph` that lie on a directed cycle.
fn on_cycles<'a>(graph: &HashMap<&'a LocalState, HashSet<&'a LocalState>>) -> Vec<&'a LocalState> {
    let mut out: Vec<&LocalState> = Vec::new();
    for &x in graph.keys() {
        let mut seen: HashSet<&LocalState> = HashSet::new();
        let mut stack: Vec<&LocalState> = graph[x].iter().copied().collect();
        while let Some(y) = stack.pop() {
            if y == x {
                out.push(x);
                break;
            }
            if seen.insert(y) {
                stack.extend(graph.get(y).into_iter().flatten().copied());
            }
        }
    }
    out.sort_by_key(|l| format!("{l}"));
    out
}

/// Path from an initial state along which node `i` holds `x`, changes, and
/// holds `x` again.
fn revisit_path(
    ts: &TransitionSystem,
    globals: &[GlobalState],
    parents: &[Option<usize>],
    i: usize,
    x: &LocalState,
) -> Option<Vec<usize>> {
    let holds = |s: usize| &globals[s].states()[i] == x;
    let mut prev: HashMap<(usize, bool), (usize, bool)> = HashMap::new();
    let mut queue: VecDeque<(usize, bool)> = VecDeque::new();
    let mut seen: HashSet<(usize, bool)> = HashSet::new();
    for s in (0..ts.len()).filter(|&s| holds(s)) {
        seen.insert((s, false));
        queue.push_back((s, false));
    }
    while let Some((s, left)) = queue.pop_front() {
        for (t, _) in ts.successors(s) {
            let next = (t, left || !holds(t));
            if left && holds(t) {
                let mut tail = vec![t, s];
                let mut cur = (s, left);
                while let Some(&p) = prev.get(&cur) {
                    tail.push(p.0);
                    cur = p;
                }
                tail.reverse();
                let mut path = path_to(parents, tail[0]);
                path.extend_from_slice(&tail[1..]);
                return Some(path);
            }
            if seen.insert(next) {
                prev.insert(next, (s, left));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Shortest-path estimates strictly decrease at every move.
pub fn check_distance_descent(ts: &TransitionSystem, expected: Expectation) -> PropertyVerdict {
    let bad = ts.edges().find(|&(s, t, l)| {
        l.mover().is_some_and(|i| {
            let before: Dist = ts.global(s)[i].path().1;
            let after: Dist = ts.global(t)[i].path().1;
            after >= before
        })
    });
    let cex = bad.map(|(s, t, _)| {
        let mut p = path_to(&bfs_parents(ts), s);
        p.push(t);
        Counterexample::new(ts, p, None, "distance estimate did not decrease")
    });
    PropertyVerdict::new(
        "distance_descent",
        expected,
        bad.is_none(),
        if bad.is_none() { "every move lowers the mover's d" } else { "a move kept or raised d" },
    )
    .with_counterexample(cex)
}

/// Rank function built from the explored system alone: 0 at sinks and
/// `n + max(successor ranks)` elsewhere.
#[derive(Clone, Debug)]
pub struct InducedOrder {
    pub n: usize,
    pub rank: Vec<u64>,
}

impl InducedOrder {
    /// The per-node value every node of `state` receives, `rank / n`.
    pub fn node_value(&self, state: usize) -> Ratio<u64> {
        Ratio::new(self.rank[state], self.n.max(1) as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InduceError {
    #[error("system has a cycle")]
    Cyclic,
    #[error("sink {0} is not optimal; the construction needs optimal sinks")]
    SuboptimalSink(usize),
}

pub fn induce_order(ts: &TransitionSystem, acyc: &Acyclicity, optimal: &[bool], n: usize) -> Result<InducedOrder, InduceError> {
    let order = acyc.order.as_ref().filter(|_| acyc.acyclic()).ok_or(InduceError::Cyclic)?;
    if let Some(s) = ts.sinks().into_iter().find(|&s| !optimal[s]) {
        return Err(InduceError::SuboptimalSink(s));
    }
    let mut rank = vec![0u64; ts.len()];
    for &s in order.iter().rev() {
        if let Some(m) = ts.successors(s).map(|(t, _)| rank[t]).max() {
            rank[s] = n as u64 + m;
        }
    }
    Ok(InducedOrder { n, rank })
}

pub fn check_induced(ts: &TransitionSystem, order: &InducedOrder) -> PropertyVerdict {
    let zero_exactly_at_sinks = (0..ts.len()).all(|s| (order.rank[s] == 0) == (ts.out_degree(s) == 0));
    let descent = ts.edges().all(|(s, t, _)| order.rank[t] < order.rank[s]);
    let top = order.rank.iter().max().copied().unwrap_or(0);
    PropertyVerdict::new(
        "induced_rank",
        Expectation::Pass,
        zero_exactly_at_sinks && descent,
        format!("rank 0 exactly at sinks: {zero_exactly_at_sinks}; strict descent: {descent}; highest rank {top}"),
    )
}

/// Longest path counting only move edges, and per node the most moves
/// that node makes along any path. `None` for cyclic systems.
pub fn longest_moves(ts: &TransitionSystem, acyc: &Acyclicity, n: usize) -> Option<(u64, Vec<u64>)> {
    let order = acyc.order.as_ref().filter(|_| acyc.acyclic())?;
    let mut total = vec![0u64; ts.len()];
    let mut per_node = vec![vec![0u64; ts.len()]; n];
    for &s in order.iter().rev() {
        for (t, l) in ts.successors(s) {
            let step = u64::from(l.mover().is_some());
            total[s] = total[s].max(total[t] + step);
            for (i, col) in per_node.iter_mut().enumerate() {
                let mine = u64::from(l == EdgeLabel::Move(NodeId(i)));
                col[s] = col[s].max(col[t] + mine);
            }
        }
    }
    let longest = ts.initial().iter().map(|&s| total[s]).max().unwrap_or(0);
    let per = per_node.iter().map(|col| ts.initial().iter().map(|&s| col[s]).max().unwrap_or(0)).collect();
    Some((longest, per))
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub longest_path_moves: Option<u64>,
    pub per_node_max_moves: Vec<u64>,
    /// Algorithm-specific bound and its name (`2m`, `2n`), if any.
    pub algo_bound: Option<(String, u64)>,
    /// Sum over nodes of `|domain_i| - 1`.
    pub generic_bound: u128,
}

impl BoundsReport {
    pub fn holds(&self) -> bool {
        self.longest_path_moves.is_some_and(|l| {
            self.algo_bound.as_ref().is_none_or(|(_, b)| l <= *b) && u128::from(l) <= self.generic_bound
        })
    }

    pub fn verdict(&self, expected: Expectation) -> PropertyVerdict {
        let detail = match (self.longest_path_moves, &self.algo_bound) {
            (None, _) => "no longest path: system is cyclic".to_string(),
            (Some(l), Some((name, b))) => format!("longest path {l} moves; {name} = {b}; generic {}", self.generic_bound),
            (Some(l), None) => format!("longest path {l} moves; generic {}", self.generic_bound),
        };
        PropertyVerdict::new("move_bound", expected, self.holds(), detail)
    }
}

/// Sum of `|domain_i| - 1`: no execution without revisits can be longer.
pub fn generic_bound(algo: &dyn Algorithm) -> u128 {
    algo.graph().nodes().map(|i| algo.local_domain(i).len().saturating_sub(1) as u128).sum()
}

/// Per-algorithm move bound from the default initial state.
pub fn algo_bound(algo: &dyn Algorithm) -> Option<(String, u64)> {
    let g = algo.graph();
    match algo.kind() {
        crate::model::AlgoKind::Dc => Some(("2m".into(), 2 * g.m() as u64)),
        crate::model::AlgoKind::Mm => Some(("2n".into(), 2 * g.n() as u64)),
        crate::model::AlgoKind::Sp => None,
    }
}

pub fn check_bounds(ts: &TransitionSystem, acyc: &Acyclicity, algo: &dyn Algorithm, with_algo_bound: bool) -> BoundsReport {
    let n = algo.graph().n();
    let (longest, per) = match longest_moves(ts, acyc, n) {
        Some((l, p)) => (Some(l), p),
        None => (None, Vec::new()),
    };
    BoundsReport {
        longest_path_moves: longest,
        per_node_max_moves: per,
        algo_bound: if with_algo_bound { algo_bound(algo) } else { None },
        generic_bound: generic_bound(algo),
    }
}
