//! Structural properties over random small graphs, checked on explored
//! systems with independent recomputation in this file.

use proptest::prelude::*;

use dagw::algo::{DominantClique, MaximalMatching, ShortestPath};
use dagw::checker::explore::{explore, EdgeLabel, ExtendedRelation, FreshRelation, TransitionRelation, TransitionSystem};
use dagw::checker::props::{check_acyclic, induce_order};
use dagw::executor::AsyncModel;
use dagw::graph::{generate, Dist, Family, Graph, NodeId};
use dagw::model::{rank, Algorithm, ExtValue, GlobalState, View};

const BUDGET: usize = 2_000_000;

fn graph(n: usize, p: f64, seed: u64) -> Graph {
    generate(Family::Gnp { p }, n, Some(seed)).unwrap()
}

fn connected(n: usize, p: f64, seed: u64) -> Graph {
    let mut g = graph(n, p, seed);
    for i in 1..n {
        if g.hop_distances(NodeId(0))[i].is_none() {
            g.add_edge(NodeId(i - 1), NodeId(i), 1).unwrap();
        }
    }
    g
}

fn silent(algo: &dyn Algorithm, s: &GlobalState) -> bool {
    algo.graph().nodes().all(|i| !algo.impedensable(&View::fresh(s, i)))
}

/// Topological order by repeated removal of sources, independent of the
/// library's checks.
fn topo_ok(ts: &TransitionSystem) -> bool {
    let mut indeg = vec![0usize; ts.len()];
    for (_, t, _) in ts.edges() {
        indeg[t] += 1;
    }
    let mut ready: Vec<usize> = (0..ts.len()).filter(|&s| indeg[s] == 0).collect();
    let mut seen = 0;
    while let Some(s) = ready.pop() {
        seen += 1;
        for (t, _) in ts.successors(s) {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                ready.push(t);
            }
        }
    }
    seen == ts.len()
}

fn common_checks(algo: &dyn Algorithm, ts: &TransitionSystem, descent: bool) -> Result<(), TestCaseError> {
    let acyc = check_acyclic(ts);
    prop_assert_eq!(acyc.dfs_acyclic, acyc.kahn_acyclic);
    prop_assert_eq!(acyc.acyclic(), topo_ok(ts));
    let ranks: Vec<ExtValue> = (0..ts.len()).map(|s| rank(algo, &ts.global(s))).collect();
    for (s, &r) in ranks.iter().enumerate() {
        let g = ts.global(s);
        let sum: ExtValue = algo.graph().nodes().map(|i| algo.state_value(i, &g)).sum();
        prop_assert_eq!(sum, r);
        prop_assert_eq!(algo.optimal(&g), silent(algo, &g));
    }
    if descent {
        for (s, t, l) in ts.edges() {
            if let (EdgeLabel::Move(_), ExtValue::Finite(a), ExtValue::Finite(b)) = (l, ranks[s], ranks[t]) {
                prop_assert!(b < a, "rank {} -> {}", a, b);
            }
        }
    }
    if acyc.acyclic() {
        let optimal: Vec<bool> = (0..ts.len()).map(|s| algo.optimal(&ts.global(s))).collect();
        if ts.sinks().iter().all(|&s| optimal[s]) {
            let order = induce_order(ts, &acyc, &optimal, algo.graph().n()).unwrap();
            for (s, t, _) in ts.edges() {
                prop_assert!(order.rank[t] < order.rank[s]);
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dominant_clique_systems(n in 1usize..6, p in 0.2f64..0.9, seed in 0u64..10_000) {
        let dc = DominantClique::new(graph(n, p, seed)).unwrap();
        let ts = explore(&FreshRelation::new(&dc), [dc.default_init()], BUDGET).unwrap();
        common_checks(&dc, &ts, true)?;
        prop_assert!(ts.sinks().iter().all(|&s| dc.optimal(&ts.global(s))));
    }

    #[test]
    fn matching_systems(n in 1usize..7, p in 0.2f64..0.9, seed in 0u64..10_000, amr in any::<bool>()) {
        let mm = MaximalMatching::new(graph(n, p, seed)).unwrap();
        let fresh = FreshRelation::new(&mm);
        let ext = ExtendedRelation::new(&mm, AsyncModel::Amr { channel_bound: 1 });
        let rel: &dyn TransitionRelation = if amr && n <= 4 { &ext } else { &fresh };
        let ts = explore(rel, [mm.default_init()], BUDGET).unwrap();
        common_checks(&mm, &ts, true)?;
        prop_assert!(check_acyclic(&ts).acyclic());
        // Every sink is a maximal matching: no edge with both ends unmatched.
        for s in ts.sinks() {
            let g = ts.global(s);
            let pairs = mm.matched_pairs(&g);
            let matched = |v: NodeId| pairs.iter().any(|&(a, b)| a == v || b == v);
            prop_assert!(mm.graph().edges().all(|(u, v, _)| matched(u) || matched(v)));
        }
    }

    #[test]
    fn shortest_path_systems(n in 1usize..6, p in 0.2f64..0.9, seed in 0u64..10_000, dest in 0usize..6, aa in any::<bool>()) {
        let g = connected(n, p, seed);
        let sp = ShortestPath::new(g, Some(NodeId(dest % n))).unwrap();
        let fresh = FreshRelation::new(&sp);
        let ext = ExtendedRelation::new(&sp, AsyncModel::Aa { window: 2 });
        let rel: &dyn TransitionRelation = if aa && n <= 4 { &ext } else { &fresh };
        let ts = explore(rel, [sp.default_init()], BUDGET).unwrap();
        common_checks(&sp, &ts, true)?;
        for s in 0..ts.len() {
            let g = ts.global(s);
            for i in sp.graph().nodes() {
                if let Dist::Finite(d) = g[i].path().1 {
                    prop_assert!(d >= sp.oracle(i), "d below the true distance");
                }
            }
        }
        for (s, t, l) in ts.edges() {
            if let EdgeLabel::Move(i) = l {
                let before = ts.global(s)[i].path().1;
                let after = ts.global(t)[i].path().1;
                prop_assert!(after < before, "{} then {}", before, after);
            }
        }
        prop_assert!(ts.sinks().iter().all(|&s| sp.optimal(&ts.global(s))));
    }

    #[test]
    fn sweeps_from_every_state(n in 1usize..4, p in 0.3f64..0.9, seed in 0u64..10_000) {
        let g = graph(n, p, seed);
        let dc = DominantClique::new(g.clone()).unwrap();
        let mm = MaximalMatching::new(g).unwrap();
        let algos: [&dyn Algorithm; 2] = [&dc, &mm];
        for algo in algos {
            let ts = explore(&FreshRelation::new(algo), dagw::model::domain_product(algo), BUDGET).unwrap();
            common_checks(algo, &ts, algo.kind() == dagw::model::AlgoKind::Dc)?;
            prop_assert!(ts.sinks().iter().all(|&s| algo.optimal(&ts.global(s))));
        }
    }
}
