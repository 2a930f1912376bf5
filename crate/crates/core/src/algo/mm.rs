//! Maximal matching: nodes point at partners, and the highest-id
//! unsatisfied node of each 2-hop neighborhood moves first.

use crate::algo::ConfigError;
use crate::graph::{Graph, NodeId};
use crate::model::{AlgoKind, Algorithm, ExtValue, GlobalState, LocalState, ModelError, View};

/// The five predicates guards and state values are built from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Macros {
    pub wrongly_matched: bool,
    pub matchable: bool,
    pub i_pointed: bool,
    pub else_pointed: bool,
    pub unsatisfied: bool,
}

#[derive(Clone, Debug)]
pub struct MaximalMatching {
    graph: Graph,
    /// `Adj²_i`: nodes at hop distance 1 or 2.
    adj2: Vec<Vec<NodeId>>,
}

impl MaximalMatching {
    pub fn new(graph: Graph) -> Result<Self, ConfigError> {
        let adj2 = graph.nodes().map(|i| graph.adj_within(i, 2).into_iter().collect()).collect();
        Ok(MaximalMatching { graph, adj2 })
    }

    pub fn adj2(&self, node: NodeId) -> &[NodeId] {
        &self.adj2[node.0]
    }

    fn wrongly_matched(observed: &[LocalState], i: NodeId) -> bool {
        match observed[i.0].mate() {
            Some(k) => observed[k.0].mate().is_some_and(|back| back != i),
            None => false,
        }
    }

    fn matchable(&self, observed: &[LocalState], i: NodeId) -> bool {
        observed[i.0].mate().is_none() && self.graph.neighbors(i).iter().any(|&j| observed[j.0].mate().is_none())
    }

    fn unsatisfied(&self, observed: &[LocalState], i: NodeId) -> bool {
        Self::wrongly_matched(observed, i) || self.matchable(observed, i)
    }

    /// Macros of the reader, read from its view.
    pub fn macros(&self, view: &View<'_>) -> Macros {
        let i = view.reader;
        let obs = view.observed;
        let wrongly_matched = Self::wrongly_matched(obs, i);
        let matchable = self.matchable(obs, i);
        let i_pointed = obs[i.0].mate().is_none() && self.graph.neighbors(i).iter().any(|&j| obs[j.0].mate() == Some(i));
        // k ranges over Adj_j, which is the domain of j[match]
        let else_pointed = self.adj2[i.0]
            .iter()
            .any(|&j| obs[j.0].mate().is_some_and(|k| obs[k.0].mate().is_none()));
        Macros { wrongly_matched, matchable, i_pointed, else_pointed, unsatisfied: wrongly_matched || matchable }
    }

    /// Mutually matched pairs `(a, b)` with `a < b`.
    pub fn matched_pairs(&self, state: &GlobalState) -> Vec<(NodeId, NodeId)> {
        self.graph
            .nodes()
            .filter_map(|i| state[i].mate().filter(|&j| i < j && state[j].mate() == Some(i)).map(|j| (i, j)))
            .collect()
    }
}

impl Algorithm for MaximalMatching {
    fn kind(&self) -> AlgoKind {
        AlgoKind::Mm
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn read_radius(&self) -> usize {
        3
    }

    fn impedensable(&self, view: &View<'_>) -> bool {
        let i = view.reader;
        let m = self.macros(view);
        if m.i_pointed {
            return true;
        }
        let id = self.graph.id(i);
        !m.else_pointed
            && m.unsatisfied
            && self.adj2[i.0].iter().all(|&j| id > self.graph.id(j) || !self.unsatisfied(view.observed, j))
    }

    fn actions(&self, view: &View<'_>) -> Result<Vec<LocalState>, ModelError> {
        let i = view.reader;
        if !self.impedensable(view) {
            return Err(ModelError::NotImpedensable { node: i });
        }
        let m = self.macros(view);
        let mut targets: Vec<NodeId> = if m.i_pointed {
            self.graph.neighbors(i).iter().copied().filter(|&j| view.of(j).mate() == Some(i)).collect()
        } else if m.wrongly_matched {
            return Ok(vec![LocalState::Match(None)]);
        } else {
            self.graph.neighbors(i).iter().copied().filter(|&j| view.of(j).mate().is_none()).collect()
        };
        targets.sort_by_key(|&j| (self.graph.id(j), j));
        Ok(targets.into_iter().map(|j| LocalState::Match(Some(j))).collect())
    }

    fn state_value(&self, node: NodeId, state: &GlobalState) -> ExtValue {
        let m = self.macros(&View::fresh(state, node));
        ExtValue::Finite(if m.wrongly_matched {
            3
        } else if m.matchable && !m.i_pointed {
            2
        } else if m.i_pointed {
            1
        } else {
            0
        })
    }

    fn optimal(&self, state: &GlobalState) -> bool {
        self.graph.nodes().all(|i| match state[i].mate() {
            Some(j) => state[j].mate() == Some(i),
            None => self.graph.neighbors(i).iter().all(|&j| state[j].mate().is_some()),
        })
    }

    /// Every node at `⊤`.
    fn default_init(&self) -> GlobalState {
        GlobalState::new(AlgoKind::Mm, self.graph.nodes().map(|_| LocalState::Match(None)).collect())
            .expect("uniform tag")
    }

    /// `Adj_i ∪ {⊤}`.
    fn local_domain(&self, node: NodeId) -> Vec<LocalState> {
        std::iter::once(LocalState::Match(None))
            .chain(self.graph.neighbors(node).iter().map(|&j| LocalState::Match(Some(j))))
            .collect()
    }

    fn check_local(&self, node: NodeId, local: &LocalState) -> Result<(), ModelError> {
        match local {
            LocalState::Match(Some(j)) if !self.graph.is_adjacent(node, *j) => {
                Err(ModelError::InvalidLocal { node, reason: format!("partner {j} is not a neighbor") })
            }
            LocalState::Match(_) => Ok(()),
            other => Err(ModelError::WrongAlgorithm { expected: AlgoKind::Mm, found: other.kind() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::testutil::v;
    use crate::graph::{fig4, generate, Family};
    use crate::model::{domain_product, enabled_nodes, rank};
    use proptest::prelude::*;

    fn st(parts: &[Option<usize>]) -> GlobalState {
        GlobalState::new(AlgoKind::Mm, parts.iter().map(|p| LocalState::Match(p.map(v))).collect()).unwrap()
    }

    fn values(mm: &MaximalMatching, s: &GlobalState) -> Vec<ExtValue> {
        mm.graph().nodes().map(|i| mm.state_value(i, s)).collect()
    }

    #[test]
    fn macros_on_star() {
        let mm = MaximalMatching::new(fig4()).unwrap();
        let top = mm.default_init();
        assert_eq!(
            mm.macros(&View::fresh(&top, v(1))),
            Macros { wrongly_matched: false, matchable: true, i_pointed: false, else_pointed: false, unsatisfied: true }
        );
        let s = st(&[None, None, None, Some(1)]);
        assert!(mm.macros(&View::fresh(&s, v(1))).i_pointed);
        let matched = st(&[Some(4), None, None, Some(1)]);
        assert_eq!(mm.macros(&View::fresh(&matched, v(1))), Macros::default());
    }

    #[test]
    fn impedensable_sets() {
        let mm = MaximalMatching::new(fig4()).unwrap();
        assert_eq!(enabled_nodes(&mm, &mm.default_init()), [v(4)]);
        assert_eq!(enabled_nodes(&mm, &st(&[None, None, None, Some(1)])), [v(1)]);
        let path = MaximalMatching::new(generate(Family::Path, 3, None).unwrap()).unwrap();
        assert_eq!(enabled_nodes(&path, &path.default_init()), [v(3)]);
    }

    #[test]
    fn actions_cases() {
        let mm = MaximalMatching::new(fig4()).unwrap();
        let top = mm.default_init();
        assert_eq!(
            mm.actions(&View::fresh(&top, v(4))).unwrap(),
            [LocalState::Match(Some(v(1))), LocalState::Match(Some(v(2))), LocalState::Match(Some(v(3)))]
        );
        let s = st(&[None, None, None, Some(1)]);
        assert_eq!(mm.actions(&View::fresh(&s, v(1))).unwrap(), [LocalState::Match(Some(v(4)))]);

        // path v1 - v2 - v3 with v1 → v2 → v3 → v2: v1 is wrongly matched
        let path = MaximalMatching::new(generate(Family::Path, 3, None).unwrap()).unwrap();
        let s = st(&[Some(2), Some(3), Some(2)]);
        assert!(path.impedensable(&View::fresh(&s, v(1))));
        assert_eq!(path.actions(&View::fresh(&s, v(1))).unwrap(), [LocalState::Match(None)]);
    }

    #[test]
    fn state_values_on_star() {
        let mm = MaximalMatching::new(fig4()).unwrap();
        let f = ExtValue::Finite;
        assert_eq!(values(&mm, &mm.default_init()), [f(2), f(2), f(2), f(2)]);
        assert_eq!(rank(&mm, &mm.default_init()), f(8));
        assert_eq!(values(&mm, &st(&[None, None, None, Some(1)])), [f(1), f(0), f(0), f(0)]);
        assert_eq!(rank(&mm, &st(&[Some(4), None, None, Some(1)])), f(0));
    }

    #[test]
    fn optimality() {
        let mm = MaximalMatching::new(fig4()).unwrap();
        assert!(mm.optimal(&st(&[Some(4), None, None, Some(1)])));
        assert!(!mm.optimal(&mm.default_init()));
        let edgeless = MaximalMatching::new(Graph::new(3).unwrap()).unwrap();
        assert!(edgeless.optimal(&edgeless.default_init()));
        assert_eq!(edgeless.local_domain(v(1)).len(), 1);
    }

    /// Matching check written from scratch: each node in at most one pair,
    /// pairs are edges, and no edge has both endpoints free.
    fn is_maximal_matching(g: &Graph, pairs: &[(NodeId, NodeId)]) -> bool {
        let mut used = vec![false; g.n()];
        for &(a, b) in pairs {
            if !g.is_adjacent(a, b) || used[a.0] || used[b.0] {
                return false;
            }
            used[a.0] = true;
            used[b.0] = true;
        }
        g.edges().all(|(a, b, _)| used[a.0] || used[b.0])
    }

    #[test]
    fn optimal_iff_silent_and_maximal() {
        for n in 1..=5 {
            for g in crate::graph::connected_graphs(n) {
                let mm = MaximalMatching::new(g.clone()).unwrap();
                for s in domain_product(&mm) {
                    let opt = mm.optimal(&s);
                    assert_eq!(opt, enabled_nodes(&mm, &s).is_empty(), "{s} on {}", g.name());
                    if opt {
                        assert!(is_maximal_matching(&g, &mm.matched_pairs(&s)));
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn moves_from_default_init_lower_rank(n in 2usize..9, p in 0.2f64..0.9, seed in 0u64..1000) {
            let g = generate(Family::Gnp { p }, n, Some(seed)).unwrap();
            let mm = MaximalMatching::new(g).unwrap();
            let mut s = mm.default_init();
            let mut moves = 0;
            while let Some(&i) = enabled_nodes(&mm, &s).first() {
                let next = s.with_local(i, mm.deterministic_action(&View::fresh(&s, i)).unwrap());
                prop_assert!(rank(&mm, &next) < rank(&mm, &s));
                s = next;
                moves += 1;
            }
            prop_assert!(moves <= 2 * n);
            prop_assert!(is_maximal_matching(mm.graph(), &mm.matched_pairs(&s)));
        }
    }
}
