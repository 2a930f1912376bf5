//! Shortest path to a fixed destination: each node keeps a next hop and a
//! distance estimate, relaxed Bellman-Ford style.

use crate::algo::ConfigError;
use crate::graph::{Dist, Graph, NodeId};
use crate::model::{AlgoKind, Algorithm, ExtValue, GlobalState, LocalState, ModelError, View};

#[derive(Clone, Debug)]
pub struct ShortestPath {
    graph: Graph,
    dest: NodeId,
    /// Oracle distance of every node to `dest`.
    dis: Vec<u64>,
}

impl ShortestPath {
    /// `dest` is the command-line choice; the graph's own `dest` line is the
    /// fallback. Both may be given only if they agree.
    pub fn new(graph: Graph, dest: Option<NodeId>) -> Result<Self, ConfigError> {
        let dest = match (dest, graph.dest()) {
            (Some(flag), Some(file)) if flag != file => return Err(ConfigError::ConflictingDestination { flag, file }),
            (Some(d), _) | (None, Some(d)) => d,
            (None, None) => return Err(ConfigError::MissingDestination),
        };
        if dest.0 >= graph.n() {
            return Err(ConfigError::DestinationOutOfRange(dest));
        }
        if !graph.is_connected() {
            return Err(ConfigError::Disconnected);
        }
        let dis = graph
            .distances_from(dest)
            .into_iter()
            .map(|d| d.finite().expect("connected graph"))
            .collect();
        Ok(ShortestPath { graph, dest, dis })
    }

    pub fn dest(&self) -> NodeId {
        self.dest
    }

    /// Oracle distance from `node` to the destination.
    pub fn oracle(&self, node: NodeId) -> u64 {
        self.dis[node.0]
    }

    /// Every node at `⟨⊤, 0⟩`. No guard holds, yet the state is optimal only
    /// when every node is the destination.
    pub fn zero_init(&self) -> GlobalState {
        let locals = self.graph.nodes().map(|_| LocalState::Path { parent: None, dist: Dist::Finite(0) }).collect();
        GlobalState::new(AlgoKind::Sp, locals).expect("uniform tag")
    }

    /// Nodes whose estimate is below the true distance, with the (negative)
    /// state value.
    pub fn value_violations(&self, state: &GlobalState) -> Vec<(NodeId, i64)> {
        self.graph
            .nodes()
            .filter_map(|i| match self.state_value(i, state) {
                ExtValue::Finite(v) if v < 0 => Some((i, v)),
                _ => None,
            })
            .collect()
    }

    /// Largest finite estimate in the enumerated domain.
    pub fn dist_cap(&self) -> u64 {
        self.graph.n() as u64 * self.graph.max_weight().max(1)
    }

    fn relaxed(&self, view: &View<'_>, j: NodeId) -> Dist {
        let w = self.graph.weight(view.reader, j).expect("neighbor");
        view.of(j).path().1 + w
    }
}

impl Algorithm for ShortestPath {
    fn kind(&self) -> AlgoKind {
        AlgoKind::Sp
    }

    fn destination(&self) -> Option<NodeId> {
        Some(self.dest)
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn read_radius(&self) -> usize {
        1
    }

    fn impedensable(&self, view: &View<'_>) -> bool {
        let i = view.reader;
        let d = view.own().path().1;
        if i == self.dest && d != Dist::Finite(0) {
            return true;
        }
        self.graph.neighbors(i).iter().any(|&j| d > self.relaxed(view, j))
    }

    fn actions(&self, view: &View<'_>) -> Result<Vec<LocalState>, ModelError> {
        let i = view.reader;
        if !self.impedensable(view) {
            return Err(ModelError::NotImpedensable { node: i });
        }
        if i == self.dest {
            return Ok(vec![LocalState::Path { parent: Some(i), dist: Dist::Finite(0) }]);
        }
        let best = self.graph.neighbors(i).iter().map(|&j| self.relaxed(view, j)).min().expect("has a neighbor");
        let mut argmin: Vec<NodeId> =
            self.graph.neighbors(i).iter().copied().filter(|&j| self.relaxed(view, j) == best).collect();
        argmin.sort_by_key(|&j| (self.graph.id(j), j));
        Ok(argmin.into_iter().map(|j| LocalState::Path { parent: Some(j), dist: best }).collect())
    }

    fn state_value(&self, node: NodeId, state: &GlobalState) -> ExtValue {
        match state[node].path().1 {
            Dist::Finite(d) => ExtValue::Finite(d as i64 - self.dis[node.0] as i64),
            Dist::Infinite => ExtValue::Infinite,
        }
    }

    fn optimal(&self, state: &GlobalState) -> bool {
        self.graph.nodes().all(|i| {
            let (p, d) = state[i].path();
            if d != Dist::Finite(self.dis[i.0]) {
                return false;
            }
            match p {
                Some(p) if i == self.dest => p == i,
                Some(p) => self.graph.weight(i, p).is_some_and(|w| self.dis[p.0] + w == self.dis[i.0]),
                None => false,
            }
        })
    }

    /// Every node at `⟨⊤, ∞⟩`.
    fn default_init(&self) -> GlobalState {
        let locals = self.graph.nodes().map(|_| LocalState::Path { parent: None, dist: Dist::Infinite }).collect();
        GlobalState::new(AlgoKind::Sp, locals).expect("uniform tag")
    }

    /// Parents in `Adj_i ∪ {⊤}` (plus `i` itself at the destination) crossed
    /// with estimates `0..=n·w_max` and `∞`.
    fn local_domain(&self, node: NodeId) -> Vec<LocalState> {
        let mut parents: Vec<Option<NodeId>> = vec![None];
        parents.extend(self.graph.neighbors(node).iter().map(|&j| Some(j)));
        if node == self.dest {
            parents.push(Some(node));
        }
        let dists: Vec<Dist> = (0..=self.dist_cap()).map(Dist::Finite).chain([Dist::Infinite]).collect();
        parents
            .iter()
            .flat_map(|&parent| dists.iter().map(move |&dist| LocalState::Path { parent, dist }))
            .collect()
    }

    fn check_local(&self, node: NodeId, local: &LocalState) -> Result<(), ModelError> {
        let LocalState::Path { parent, .. } = local else {
            return Err(ModelError::WrongAlgorithm { expected: AlgoKind::Sp, found: local.kind() });
        };
        match parent {
            Some(p) if *p == node && node != self.dest => {
                Err(ModelError::InvalidLocal { node, reason: "only the destination may point at itself".into() })
            }
            Some(p) if *p != node && !self.graph.is_adjacent(node, *p) => {
                Err(ModelError::InvalidLocal { node, reason: format!("next hop {p} is not a neighbor") })
            }
            _ => Ok(()),
        }
    }
}
