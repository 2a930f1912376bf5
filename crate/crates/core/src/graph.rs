//! Undirected graphs with per-node identifiers and positive integer weights.
//!
//! Node indices are 0-based internally and 1-based in every textual format
//! (files, CLI, JSON, DOT), so node `NodeId(0)` prints as `v1`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::fmt;
use std::ops::Add;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a node in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }

    /// 1-based label used in files and reports.
    pub fn label(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0 + 1)
    }
}

/// A non-negative integer distance, or infinity.
///
/// `Finite(_) < Infinite`, and adding anything to `Infinite` stays infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dist {
    Finite(u64),
    Infinite,
}

impl Dist {
    pub fn finite(self) -> Option<u64> {
        match self {
            Dist::Finite(d) => Some(d),
            Dist::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Dist::Infinite)
    }
}

impl Add<u64> for Dist {
    type Output = Dist;

    fn add(self, w: u64) -> Dist {
        match self {
            Dist::Finite(d) => d.checked_add(w).map_or(Dist::Infinite, Dist::Finite),
            Dist::Infinite => Dist::Infinite,
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(d) => write!(f, "{d}"),
            Dist::Infinite => f.write_str("∞"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: endpoint {endpoint} out of range 1..={n}")]
    EndpointOutOfRange { line: usize, endpoint: usize, n: usize },
    #[error("line {line}: edge {u}-{v} repeated with conflicting weight")]
    ConflictingEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: edge weights must be positive")]
    NonPositiveWeight { line: usize },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },
    #[error("node id {id} assigned to more than one node")]
    DuplicateId { id: u64 },
    #[error("missing `n <count>` header")]
    MissingHeader,
    #[error("graph must have at least one node")]
    Empty,
}

/// Undirected graph with symmetric adjacency, no self-loops and weights >= 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    name: String,
    ids: Vec<u64>,
    adj: Vec<Vec<NodeId>>,
    weights: BTreeMap<(usize, usize), u64>,
    dest: Option<NodeId>,
}

fn edge_key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Edgeless graph on `n` nodes with default ids.
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        Ok(Graph {
            name: String::new(),
            ids: (0..n as u64).collect(),
            adj: vec![Vec::new(); n],
            weights: BTreeMap::new(),
            dest: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Adds edge `{u, v}` (0-based). Re-adding an existing edge with the same
    /// weight is a no-op.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId, w: u64) -> Result<(), GraphError> {
        let n = self.n();
        for x in [u, v] {
            if x.0 >= n {
                return Err(GraphError::EndpointOutOfRange { line: 0, endpoint: x.0 + 1, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop { line: 0, node: u.0 + 1 });
        }
        if w == 0 {
            return Err(GraphError::NonPositiveWeight { line: 0 });
        }
        let key = edge_key(u.0, v.0);
        match self.weights.get(&key) {
            Some(&old) if old == w => return Ok(()),
            Some(_) => return Err(GraphError::ConflictingEdge { line: 0, u: u.0 + 1, v: v.0 + 1 }),
            None => {}
        }
        self.weights.insert(key, w);
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adj[a.0];
            let pos = list.binary_search(&b).unwrap_err();
            list.insert(pos, b);
        }
        Ok(())
    }

    pub fn set_id(&mut self, node: NodeId, id: u64) -> Result<(), GraphError> {
        if self.ids.iter().enumerate().any(|(k, &other)| k != node.0 && other == id) {
            return Err(GraphError::DuplicateId { id });
        }
        self.ids[node.0] = id;
        Ok(())
    }

    pub fn set_dest(&mut self, dest: Option<NodeId>) {
        self.dest = dest;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n()).map(NodeId)
    }

    pub fn id(&self, node: NodeId) -> u64 {
        self.ids[node.0]
    }

    pub fn dest(&self) -> Option<NodeId> {
        self.dest
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adj[node.0]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adj[node.0].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_adjacent(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u.0].binary_search(&v).is_ok()
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> Option<u64> {
        self.weights.get(&edge_key(u.0, v.0)).copied()
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.values().copied().max().unwrap_or(1)
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted ascending.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, u64)> + '_ {
        self.weights.iter().map(|(&(u, v), &w)| (NodeId(u), NodeId(v), w))
    }

    /// Hop distances from `src` (`None` when unreachable).
    pub fn hop_distances(&self, src: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::from([src]);
        dist[src.0] = Some(0);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.0].unwrap_or(0);
            for &v in &self.adj[u.0] {
                if dist[v.0].is_none() {
                    dist[v.0] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Nodes at hop distance `1..=x` from `node`; never contains `node`.
    pub fn adj_within(&self, node: NodeId, x: usize) -> BTreeSet<NodeId> {
        self.hop_distances(node)
            .into_iter()
            .enumerate()
            .filter_map(|(j, d)| match d {
                Some(d) if d >= 1 && d <= x => Some(NodeId(j)),
                _ => None,
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.hop_distances(NodeId(0)).iter().all(Option::is_some)
    }

    /// Largest hop distance between two nodes, `None` if disconnected.
    pub fn hop_diameter(&self) -> Option<usize> {
        let mut best = 0;
        for u in self.nodes() {
            for d in self.hop_distances(u) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    /// Weighted shortest-path lengths from `src` (Dijkstra).
    pub fn distances_from(&self, src: NodeId) -> Vec<Dist> {
        #[derive(PartialEq, Eq)]
        struct Entry(u64, usize);
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> Ordering {
                other.0.cmp(&self.0).then_with(|| other.1.cmp(&self.1))
            }
        }
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let mut dist = vec![Dist::Infinite; self.n()];
        let mut heap = BinaryHeap::new();
        dist[src.0] = Dist::Finite(0);
        heap.push(Entry(0, src.0));
        while let Some(Entry(d, u)) = heap.pop() {
            if Dist::Finite(d) > dist[u] {
                continue;
            }
            for &v in &self.adj[u] {
                let w = self.weights[&edge_key(u, v.0)];
                let cand = Dist::Finite(d) + w;
                if cand < dist[v.0] {
                    dist[v.0] = cand;
                    if let Dist::Finite(c) = cand {
                        heap.push(Entry(c, v.0));
                    }
                }
            }
        }
        dist
    }

    /// `dis(i, j)`: weighted shortest-path length, infinite when disconnected.
    pub fn shortest_distance(&self, i: NodeId, j: NodeId) -> Dist {
        self.distances_from(i)[j.0]
    }

    /// Largest finite weighted distance between two nodes, `None` if disconnected.
    pub fn weighted_diameter(&self) -> Option<u64> {
        let mut best = 0;
        for u in self.nodes() {
            for d in self.distances_from(u) {
                best = best.max(d.finite()?);
            }
        }
        Some(best)
    }

    /// Parses the line-oriented graph format (see crate docs).
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut graph: Option<Graph> = None;
        let mut explicit_ids: BTreeMap<usize, u64> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let malformed = |msg: &str| GraphError::Malformed { line, msg: msg.to_string() };
            let Some(g) = graph.as_mut() else {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(GraphError::MissingHeader);
                }
                let n: usize = fields[1].parse().map_err(|_| malformed("bad node count"))?;
                if n == 0 {
                    return Err(GraphError::Empty);
                }
                graph = Some(Graph::new(n)?);
                continue;
            };
            let n = g.n();
            let node = |tok: &str| -> Result<NodeId, GraphError> {
                let v: i64 = tok.parse().map_err(|_| malformed("bad node index"))?;
                if v < 1 || v as usize > n {
                    return Err(GraphError::EndpointOutOfRange { line, endpoint: v.max(0) as usize, n });
                }
                Ok(NodeId(v as usize - 1))
            };
            match fields[0] {
                "n" => return Err(malformed("repeated `n` header")),
                "id" => {
                    if fields.len() != 3 {
                        return Err(malformed("expected `id <index> <numeric-id>`"));
                    }
                    let v = node(fields[1])?;
                    let id: u64 = fields[2].parse().map_err(|_| malformed("bad numeric id"))?;
                    if explicit_ids.insert(v.0, id).is_some_and(|old| old != id) {
                        return Err(malformed("node given two different ids"));
                    }
                }
                "e" => {
                    if fields.len() != 3 && fields.len() != 4 {
                        return Err(malformed("expected `e <u> <v> [w]`"));
                    }
                    let u = node(fields[1])?;
                    let v = node(fields[2])?;
                    let w = match fields.get(3) {
                        Some(tok) => {
                            let w: i64 = tok.parse().map_err(|_| malformed("bad weight"))?;
                            if w <= 0 {
                                return Err(GraphError::NonPositiveWeight { line });
                            }
                            w as u64
                        }
                        None => 1,
                    };
                    g.add_edge(u, v, w).map_err(|e| match e {
                        GraphError::SelfLoop { node, .. } => GraphError::SelfLoop { line, node },
                        GraphError::ConflictingEdge { u, v, .. } => GraphError::ConflictingEdge { line, u, v },
                        other => other,
                    })?;
                }
                "dest" => {
                    if fields.len() != 2 {
                        return Err(malformed("expected `dest <v>`"));
                    }
                    let v = node(fields[1])?;
                    g.dest = Some(v);
                }
                other => return Err(malformed(&format!("unknown directive `{other}`"))),
            }
        }
        let mut g = graph.ok_or(GraphError::MissingHeader)?;
        for (&idx, &id) in &explicit_ids {
            g.ids[idx] = id;
        }
        let distinct: BTreeSet<u64> = g.ids.iter().copied().collect();
        if distinct.len() != g.ids.len() {
            let mut seen = BTreeSet::new();
            let dup = g.ids.iter().find(|id| !seen.insert(**id)).copied().unwrap_or_default();
            return Err(GraphError::DuplicateId { id: dup });
        }
        Ok(g)
    }

    /// Canonical text form: header, non-default ids, sorted edges, destination.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str(&format!("# {}\n", self.name));
        }
        out.push_str(&format!("n {}\n", self.n()));
        for (idx, &id) in self.ids.iter().enumerate() {
            if id != idx as u64 {
                out.push_str(&format!("id {} {}\n", idx + 1, id));
            }
        }
        for (u, v, w) in self.edges() {
            if w == 1 {
                out.push_str(&format!("e {} {}\n", u.label(), v.label()));
            } else {
                out.push_str(&format!("e {} {} {}\n", u.label(), v.label(), w));
            }
        }
        if let Some(d) = self.dest {
            out.push_str(&format!("dest {}\n", d.label()));
        }
        out
    }
}

/// Generator families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Path,
    /// Star whose center is the highest-index node.
    Star,
    Clique,
    /// Erdős–Rényi `G(n, p)`; needs a seed.
    Gnp { p: f64 },
}

/// Deterministic generator for the standard families.
pub fn generate(family: Family, n: usize, seed: Option<u64>) -> Result<Graph, GraphError> {
    let mut g = Graph::new(n)?;
    let malformed = |msg: &str| GraphError::Malformed { line: 0, msg: msg.to_string() };
    let name = match family {
        Family::Path => {
            for i in 1..n {
                g.add_edge(NodeId(i - 1), NodeId(i), 1)?;
            }
            format!("path{n}")
        }
        Family::Star => {
            for i in 0..n.saturating_sub(1) {
                g.add_edge(NodeId(i), NodeId(n - 1), 1)?;
            }
            format!("star{n}")
        }
        Family::Clique => {
            for i in 0..n {
                for j in i + 1..n {
                    g.add_edge(NodeId(i), NodeId(j), 1)?;
                }
            }
            format!("clique{n}")
        }
        Family::Gnp { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(malformed("gnp probability must lie in [0, 1]"));
            }
            let seed = seed.ok_or_else(|| malformed("gnp requires a seed"))?;
            let mut rng = SplitMix64::seed_from_u64(seed);
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < p {
                        g.add_edge(NodeId(i), NodeId(j), 1)?;
                    }
                }
            }
            format!("gnp:{n}:{p}:{seed}")
        }
    };
    Ok(g.with_name(name))
}

/// Three-node graph with `v1` adjacent to `v2` and `v3`.
pub fn fig1() -> Graph {
    let mut g = Graph::new(3).expect("n > 0").with_name("fig1");
    g.add_edge(NodeId(0), NodeId(1), 1).expect("valid edge");
    g.add_edge(NodeId(0), NodeId(2), 1).expect("valid edge");
    g
}

/// Weighted four-cycle `v1-v2 (2)`, `v1-v3 (3)`, `v2-v4 (2)`, `v3-v4 (1)`.
pub fn fig3() -> Graph {
    let mut g = Graph::new(4).expect("n > 0").with_name("fig3");
    for (u, v, w) in [(0, 1, 2), (0, 2, 3), (1, 3, 2), (2, 3, 1)] {
        g.add_edge(NodeId(u), NodeId(v), w).expect("valid edge");
    }
    g
}

/// Star on four nodes with center `v4`.
pub fn fig4() -> Graph {
    generate(Family::Star, 4, None).expect("n > 0").with_name("fig4")
}

/// Connected graphs on `n` nodes, one representative per isomorphism class.
///
/// Brute force over edge subsets and node permutations, intended for n <= 6.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=6).contains(&n), "connected_graphs supports 1 <= n <= 6");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms = permutations(n);
    let mut canon_seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let canon = perms
            .iter()
            .map(|p| {
                let mut m = 0u32;
                for (b, &(i, j)) in pairs.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        let key = edge_key(p[i], p[j]);
                        let idx = pairs.iter().position(|&q| q == key).expect("pair exists");
                        m |= 1 << idx;
                    }
                }
                m
            })
            .min()
            .unwrap_or(mask);
        if !canon_seen.insert(canon) {
            continue;
        }
        let mut g = Graph::new(n).expect("n > 0");
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if canon >> b & 1 == 1 {
                g.add_edge(NodeId(i), NodeId(j), 1).expect("valid edge");
            }
        }
        if g.is_connected() {
            let name = format!("conn{n}-{canon:x}");
            out.push(g.with_name(name));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> NodeId {
        NodeId(i - 1)
    }

    #[test]
    fn parses_fig1() {
        let g = Graph::parse("n 3\ne 1 2\ne 1 3").unwrap();
        assert_eq!(g.n(), 3);
        assert!(g.is_adjacent(v(1), v(2)));
        assert!(g.is_adjacent(v(1), v(3)));
        assert!(!g.is_adjacent(v(2), v(3)));
        assert_eq!(g.id(v(2)), 1);
        assert_eq!(g.weight(v(1), v(3)), Some(1));
    }

    #[test]
    fn parses_single_node() {
        let g = Graph::parse("# lone\nn 1\n").unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Graph::parse("n 3\ne 1 5"),
            Err(GraphError::EndpointOutOfRange { line: 2, endpoint: 5, n: 3 })
        ));
        assert!(matches!(Graph::parse("n 3\ne 1 2 4\ne 2 1 3"), Err(GraphError::ConflictingEdge { line: 3, .. })));
        assert!(Graph::parse("n 3\ne 1 2 4\ne 2 1 4").is_ok());
        assert!(matches!(Graph::parse("n 3\ne 1 2 0"), Err(GraphError::NonPositiveWeight { line: 2 })));
        assert!(matches!(Graph::parse("n 3\ne 1 2 -3"), Err(GraphError::NonPositiveWeight { line: 2 })));
        assert!(matches!(Graph::parse("n 3\nid 1 7\nid 2 7"), Err(GraphError::DuplicateId { id: 7 })));
        assert!(matches!(Graph::parse("n 3\nid 1 2"), Err(GraphError::DuplicateId { id: 2 })));
        assert!(matches!(Graph::parse("n 2\ne 1 1"), Err(GraphError::SelfLoop { line: 2, node: 1 })));
        assert!(matches!(Graph::parse("e 1 2"), Err(GraphError::MissingHeader)));
        assert!(matches!(Graph::parse("n 2\nfoo"), Err(GraphError::Malformed { line: 2, .. })));
        assert!(matches!(Graph::parse("n 0"), Err(GraphError::Empty)));
    }

    #[test]
    fn writer_is_canonical() {
        let g = Graph::parse("n 4\nid 4 40\ne 4 3 1\ne 2 1 2\ndest 4").unwrap();
        let text = g.to_text();
        assert_eq!(text, "n 4\nid 4 40\ne 1 2 2\ne 3 4\ndest 4\n");
        assert_eq!(Graph::parse(&text).unwrap(), g);
    }

    #[test]
    fn generators() {
        let p = generate(Family::Path, 3, None).unwrap();
        assert_eq!(p.edges().map(|(u, v, _)| (u.label(), v.label())).collect::<Vec<_>>(), [(1, 2), (2, 3)]);
        let s = generate(Family::Star, 4, None).unwrap();
        assert_eq!(s.neighbors(v(4)), &[v(1), v(2), v(3)]);
        assert_eq!(s.degree(v(1)), 1);
        let k = generate(Family::Clique, 1, None).unwrap();
        assert_eq!((k.n(), k.m()), (1, 0));
        assert_eq!(generate(Family::Path, 0, None), Err(GraphError::Empty));
        assert!(generate(Family::Gnp { p: 0.5 }, 5, None).is_err());
        let a = generate(Family::Gnp { p: 0.5 }, 6, Some(9)).unwrap();
        let b = generate(Family::Gnp { p: 0.5 }, 6, Some(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn adj_within_star() {
        let g = fig4();
        assert_eq!(g.adj_within(v(1), 2), BTreeSet::from([v(2), v(3), v(4)]));
        assert_eq!(g.adj_within(v(1), 1), BTreeSet::from([v(4)]));
        let p = generate(Family::Path, 5, None).unwrap();
        assert_eq!(p.adj_within(v(1), 10).len(), 4);
    }

    #[test]
    fn distances() {
        let g = fig3();
        assert_eq!(g.shortest_distance(v(1), v(4)), Dist::Finite(4));
        assert_eq!(g.shortest_distance(v(4), v(4)), Dist::Finite(0));
        let p = generate(Family::Path, 3, None).unwrap();
        assert_eq!(p.shortest_distance(v(1), v(3)), Dist::Finite(2));
        let mut two = Graph::new(2).unwrap();
        assert_eq!(two.shortest_distance(v(1), v(2)), Dist::Infinite);
        two.add_edge(v(1), v(2), 5).unwrap();
        assert_eq!(two.shortest_distance(v(1), v(2)), Dist::Finite(5));
        assert_eq!(g.hop_diameter(), Some(2));
        assert_eq!(g.weighted_diameter(), Some(4));
    }

    #[test]
    fn dist_arithmetic() {
        assert_eq!(Dist::Infinite + 3, Dist::Infinite);
        assert_eq!(Dist::Finite(2) + 3, Dist::Finite(5));
        assert!(Dist::Finite(u64::MAX) < Dist::Infinite);
        assert!(Dist::Infinite <= Dist::Infinite);
    }

    #[test]
    fn connected_graph_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, [1, 1, 2, 6, 21]);
    }
}
