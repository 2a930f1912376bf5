//! Dominant clique: every node stores a maximal clique containing itself.

use crate::algo::ConfigError;
use crate::graph::{Graph, NodeId};
use crate::model::{AlgoKind, Algorithm, ExtValue, GlobalState, LocalState, ModelError, NodeSet, View};

/// Default bound on node degree; the state value searches subsets of a
/// node's neighborhood.
pub const DEFAULT_DEGREE_CAP: usize = 16;

#[derive(Clone, Debug)]
pub struct DominantClique {
    graph: Graph,
    adj: Vec<NodeSet>,
    /// Local states range over all subsets of `V` instead of `Adj_i ∪ {i}`.
    any_subset: bool,
}

impl DominantClique {
    pub fn new(graph: Graph) -> Result<Self, ConfigError> {
        Self::with_degree_cap(graph, DEFAULT_DEGREE_CAP)
    }

    pub fn with_degree_cap(graph: Graph, cap: usize) -> Result<Self, ConfigError> {
        if graph.n() > NodeSet::MAX_NODES {
            return Err(ConfigError::TooManyNodes { n: graph.n(), max: NodeSet::MAX_NODES });
        }
        if let Some(node) = graph.nodes().find(|&i| graph.degree(i) > cap) {
            return Err(ConfigError::DegreeCapExceeded { node, degree: graph.degree(node), cap });
        }
        let adj = graph.nodes().map(|i| graph.neighbors(i).iter().copied().collect()).collect();
        Ok(DominantClique { graph, adj, any_subset: false })
    }

    /// Variant whose local domain is every subset of `V`. The guards and
    /// actions are unchanged; members outside `Adj_i ∪ {i}` simply make the
    /// state invalid.
    pub fn with_any_subset(graph: Graph) -> Result<Self, ConfigError> {
        let mut dc = Self::new(graph)?;
        dc.any_subset = true;
        Ok(dc)
    }

    pub fn is_clique(&self, set: NodeSet) -> bool {
        set.iter().all(|j| set.without(j).is_subset(self.adj[j.0]))
    }

    /// `i ∈ cliq` and `cliq` is a clique.
    pub fn is_valid(&self, node: NodeId, cliq: NodeSet) -> bool {
        cliq.contains(node) && self.is_clique(cliq)
    }

    /// Neighbors of `node` outside `cliq` adjacent to every member of `cliq`.
    pub fn addable(&self, node: NodeId, cliq: NodeSet) -> impl Iterator<Item = NodeId> + '_ {
        self.graph
            .neighbors(node)
            .iter()
            .copied()
            .filter(move |&j| !cliq.contains(j) && cliq.is_subset(self.adj[j.0]))
    }

    /// Size of the largest clique among `candidates`.
    fn max_clique_within(&self, candidates: NodeSet) -> usize {
        fn search(adj: &[NodeSet], cands: NodeSet, size: usize, best: &mut usize) {
            if cands.is_empty() {
                *best = (*best).max(size);
                return;
            }
            if size + cands.len() <= *best {
                return;
            }
            let v = cands.iter().next().expect("non-empty");
            search(adj, cands.intersection(adj[v.0]), size + 1, best);
            search(adj, cands.without(v), size, best);
        }
        let mut best = 0;
        search(&self.adj, candidates, 0, &mut best);
        best
    }

    /// `|C| - |cliq|` for the largest clique `C ⊇ cliq`; `cliq` must be a
    /// non-empty clique.
    pub fn extension_gap(&self, cliq: NodeSet) -> usize {
        let common = cliq.iter().fold(NodeSet(u64::MAX), |acc, k| acc.intersection(self.adj[k.0]));
        self.max_clique_within(NodeSet(common.0 & !cliq.0))
    }
}

impl Algorithm for DominantClique {
    fn kind(&self) -> AlgoKind {
        AlgoKind::Dc
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn read_radius(&self) -> usize {
        1
    }

    fn impedensable(&self, view: &View<'_>) -> bool {
        let i = view.reader;
        let cliq = view.own().cliq();
        !self.is_valid(i, cliq) || self.addable(i, cliq).next().is_some()
    }

    fn actions(&self, view: &View<'_>) -> Result<Vec<LocalState>, ModelError> {
        let i = view.reader;
        let cliq = view.own().cliq();
        if !self.is_valid(i, cliq) {
            return Ok(vec![LocalState::Clique(NodeSet::singleton(i))]);
        }
        let mut adds: Vec<NodeId> = self.addable(i, cliq).collect();
        if adds.is_empty() {
            return Err(ModelError::NotImpedensable { node: i });
        }
        adds.sort_by_key(|&j| (self.graph.id(j), j));
        Ok(adds.into_iter().map(|j| LocalState::Clique(cliq.with(j))).collect())
    }

    fn state_value(&self, node: NodeId, state: &GlobalState) -> ExtValue {
        let cliq = state[node].cliq();
        let v = if self.is_valid(node, cliq) { self.extension_gap(cliq) } else { self.graph.degree(node) + 1 };
        ExtValue::Finite(v as i64)
    }

    fn optimal(&self, state: &GlobalState) -> bool {
        self.graph.nodes().all(|i| {
            let cliq = state[i].cliq();
            self.is_valid(i, cliq) && self.addable(i, cliq).next().is_none()
        })
    }

    /// Every node starts with `{i}`.
    fn default_init(&self) -> GlobalState {
        let locals = self.graph.nodes().map(|i| LocalState::Clique(NodeSet::singleton(i))).collect();
        GlobalState::new(AlgoKind::Dc, locals).expect("uniform tag")
    }

    /// All subsets of `Adj_i ∪ {i}`, or of `V` for [`DominantClique::with_any_subset`].
    fn local_domain(&self, node: NodeId) -> Vec<LocalState> {
        let members: Vec<NodeId> = if self.any_subset {
            self.graph.nodes().collect()
        } else {
            let mut m: Vec<NodeId> = self.graph.neighbors(node).to_vec();
            m.push(node);
            m.sort();
            m
        };
        (0u64..1 << members.len())
            .map(|bits| {
                let set = members.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, &j)| j).collect();
                LocalState::Clique(set)
            })
            .collect()
    }

    fn check_local(&self, node: NodeId, local: &LocalState) -> Result<(), ModelError> {
        let LocalState::Clique(cliq) = local else {
            return Err(ModelError::WrongAlgorithm { expected: AlgoKind::Dc, found: local.kind() });
        };
        let all = NodeSet((0..self.graph.n()).fold(0u64, |m, k| m | 1 << k));
        let allowed = if self.any_subset { all } else { self.adj[node.0].with(node) };
        if !cliq.is_subset(allowed) {
            return Err(ModelError::InvalidLocal { node, reason: format!("{cliq} is not within Adj ∪ {{{}}}", node.label()) });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::testutil::v;
    use crate::graph::{fig1, fig4, generate, Family};
    use crate::model::{apply_move, enabled_nodes, rank};
    use proptest::prelude::*;

    fn cl(members: &[usize]) -> LocalState {
        LocalState::Clique(members.iter().map(|&k| v(k)).collect())
    }

    fn state(parts: &[&[usize]]) -> GlobalState {
        GlobalState::new(AlgoKind::Dc, parts.iter().map(|p| cl(p)).collect()).unwrap()
    }

    #[test]
    fn optimal_states_of_fig1() {
        let dc = DominantClique::new(fig1()).unwrap();
        assert!(dc.optimal(&state(&[&[1, 2], &[1, 2], &[1, 3]])));
        assert!(!dc.optimal(&state(&[&[1], &[2], &[3]])));
        let single = DominantClique::new(generate(Family::Clique, 1, None).unwrap()).unwrap();
        assert!(single.optimal(&state(&[&[1]])));
    }

    #[test]
    fn impedensable_cases() {
        let dc = DominantClique::new(fig1()).unwrap();
        let s = state(&[&[1], &[2], &[3]]);
        assert!(dc.impedensable(&View::fresh(&s, v(1))));
        let s = state(&[&[1, 2], &[2], &[3]]);
        assert!(!dc.impedensable(&View::fresh(&s, v(1))));
        let s = state(&[&[2, 3], &[2], &[3]]);
        assert!(dc.impedensable(&View::fresh(&s, v(1))));
    }

    #[test]
    fn actions_cases() {
        let dc = DominantClique::new(fig1()).unwrap();
        let s = state(&[&[1], &[2], &[3]]);
        assert_eq!(dc.actions(&View::fresh(&s, v(1))).unwrap(), [cl(&[1, 2]), cl(&[1, 3])]);
        let s = state(&[&[2, 3], &[2], &[3]]);
        assert_eq!(dc.actions(&View::fresh(&s, v(1))).unwrap(), [cl(&[1])]);
        let s = state(&[&[1, 2], &[2], &[3]]);
        assert_eq!(dc.actions(&View::fresh(&s, v(1))), Err(ModelError::NotImpedensable { node: v(1) }));

        let star = DominantClique::new(fig4()).unwrap();
        let s = star.default_init();
        assert_eq!(
            star.actions(&View::fresh(&s, v(4))).unwrap(),
            [cl(&[4, 1]), cl(&[4, 2]), cl(&[4, 3])]
        );
    }

    #[test]
    fn deterministic_action_uses_ids() {
        let mut g = fig1();
        g.set_id(v(1), 10).unwrap();
        g.set_id(v(2), 9).unwrap();
        g.set_id(v(3), 8).unwrap();
        let dc = DominantClique::new(g).unwrap();
        let s = dc.default_init();
        assert_eq!(dc.deterministic_action(&View::fresh(&s, v(1))).unwrap(), cl(&[1, 3]));
    }

    #[test]
    fn state_values_of_fig1_node1() {
        let dc = DominantClique::new(fig1()).unwrap();
        let val = |c: &[usize]| dc.state_value(v(1), &state(&[c, &[2], &[3]]));
        assert_eq!(val(&[1, 2]), ExtValue::Finite(0));
        assert_eq!(val(&[1, 3]), ExtValue::Finite(0));
        assert_eq!(val(&[1]), ExtValue::Finite(1));
        for bottom in [&[1, 2, 3][..], &[2, 3], &[], &[2], &[3]] {
            assert_eq!(val(bottom), ExtValue::Finite(3), "{bottom:?}");
        }
        assert_eq!(rank(&dc, &state(&[&[1], &[2], &[3]])), ExtValue::Finite(3));
    }

    #[test]
    fn apply_move_checks_domain() {
        let dc = DominantClique::new(fig1()).unwrap();
        let s = dc.default_init();
        assert_eq!(apply_move(&dc, &s, v(1), s[v(1)].clone()).unwrap(), s);
        let bad = apply_move(&dc, &s, v(2), cl(&[2, 3]));
        assert!(matches!(bad, Err(ModelError::InvalidLocal { .. })));
        assert_eq!(dc.local_domain(v(1)).len(), 8);
        assert_eq!(dc.local_domain(v(2)).len(), 4);
        let wide = DominantClique::with_any_subset(fig1()).unwrap();
        assert_eq!(crate::model::domain_product(&wide).size(), 512);
        assert!(apply_move(&wide, &s, v(2), cl(&[2, 3])).is_ok());
    }

    #[test]
    fn degree_cap_is_enforced() {
        let g = generate(Family::Star, 6, None).unwrap();
        assert!(matches!(
            DominantClique::with_degree_cap(g, 4),
            Err(ConfigError::DegreeCapExceeded { degree: 5, cap: 4, .. })
        ));
    }

    /// Largest clique containing `cliq` by plain subset enumeration.
    fn brute_force_gap(g: &Graph, node: NodeId, cliq: NodeSet) -> usize {
        let mut members: Vec<NodeId> = g.neighbors(node).to_vec();
        members.push(node);
        let is_clique = |set: &[NodeId]| set.iter().all(|&a| set.iter().all(|&b| a == b || g.is_adjacent(a, b)));
        let mut best = 0;
        for bits in 0u32..1 << members.len() {
            let set: Vec<NodeId> = members.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, &j)| j).collect();
            if cliq.iter().all(|c| set.contains(&c)) && is_clique(&set) {
                best = best.max(set.len());
            }
        }
        best - cliq.len()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn extension_gap_matches_brute_force(n in 2usize..13, p in 0.2f64..0.95, seed in 0u64..10_000, pick in 0usize..4096) {
            let g = generate(Family::Gnp { p }, n, Some(seed)).unwrap();
            let dc = DominantClique::new(g.clone()).unwrap();
            for i in g.nodes() {
                let domain = dc.local_domain(i);
                for k in 0..4 {
                    let cliq = domain[(pick + k * 977) % domain.len()].cliq();
                    if dc.is_valid(i, cliq) {
                        prop_assert_eq!(dc.extension_gap(cliq), brute_force_gap(&g, i, cliq));
                    }
                }
            }
        }

        #[test]
        fn actions_strictly_decrease_own_value(n in 2usize..8, p in 0.2f64..0.9, seed in 0u64..1000, pick in proptest::collection::vec(0usize..256, 8)) {
            let g = generate(Family::Gnp { p }, n, Some(seed)).unwrap();
            let dc = DominantClique::new(g.clone()).unwrap();
            let locals: Vec<LocalState> = g.nodes().map(|i| { let d = dc.local_domain(i); d[pick[i.0] % d.len()].clone() }).collect();
            let s = GlobalState::new(AlgoKind::Dc, locals).unwrap();
            let enabled = enabled_nodes(&dc, &s);
            prop_assert_eq!(enabled.is_empty(), dc.optimal(&s));
            for i in enabled {
                let before = dc.state_value(i, &s);
                for a in dc.actions(&View::fresh(&s, i)).unwrap() {
                    let next = apply_move(&dc, &s, i, a).unwrap();
                    prop_assert!(dc.state_value(i, &next) < before);
                }
            }
        }
    }
}
