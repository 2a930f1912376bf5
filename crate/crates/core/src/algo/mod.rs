//! The three guarded-command algorithms.

use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::model::{AlgoKind, Algorithm};

pub mod dc;
pub mod mm;
pub mod sp;

pub use dc::DominantClique;
pub use mm::MaximalMatching;
pub use sp::ShortestPath;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("graph has {n} nodes; at most {max} are supported")]
    TooManyNodes { n: usize, max: usize },
    #[error("node {node} has degree {degree}, above the configured cap {cap}")]
    DegreeCapExceeded { node: NodeId, degree: usize, cap: usize },
    #[error("shortest path needs a destination (`--dest` or a `dest` line)")]
    MissingDestination,
    #[error("destination given twice: {flag} on the command line, {file} in the graph")]
    ConflictingDestination { flag: NodeId, file: NodeId },
    #[error("destination {0} is not a node of the graph")]
    DestinationOutOfRange(NodeId),
    #[error("shortest path needs a connected graph")]
    Disconnected,
}

/// Instantiates an algorithm on `graph`. `dest` only matters for SP.
pub fn build(kind: AlgoKind, graph: Graph, dest: Option<NodeId>) -> Result<Box<dyn Algorithm>, ConfigError> {
    Ok(match kind {
        AlgoKind::Dc => Box::new(DominantClique::new(graph)?),
        AlgoKind::Sp => Box::new(ShortestPath::new(graph, dest)?),
        AlgoKind::Mm => Box::new(MaximalMatching::new(graph)?),
    })
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::graph::NodeId;

    pub fn v(i: usize) -> NodeId {
        NodeId(i - 1)
    }
}

#[cfg(test)]
mod radius_tests {
    //! Algorithms must not depend on view entries beyond their read radius.
    use super::*;
    use crate::graph::{generate, Family};
    use crate::model::{LocalState, View};
    use proptest::prelude::*;

    fn check_radius(algo: &dyn Algorithm, picks: &[usize], noise: &[usize]) {
        let g = algo.graph();
        let domains: Vec<Vec<LocalState>> = g.nodes().map(|i| algo.local_domain(i)).collect();
        let base: Vec<LocalState> = g.nodes().map(|i| domains[i.0][picks[i.0] % domains[i.0].len()].clone()).collect();
        for reader in g.nodes() {
            let near = g.adj_within(reader, algo.read_radius());
            let mut perturbed = base.clone();
            for j in g.nodes() {
                if j != reader && !near.contains(&j) {
                    perturbed[j.0] = domains[j.0][noise[j.0] % domains[j.0].len()].clone();
                }
            }
            let a = View { reader, observed: &base };
            let b = View { reader, observed: &perturbed };
            assert_eq!(algo.impedensable(&a), algo.impedensable(&b));
            assert_eq!(algo.actions(&a), algo.actions(&b));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn views_respect_read_radius(
            n in 5usize..9,
            seed in 0u64..1000,
            picks in proptest::collection::vec(0usize..1000, 9),
            noise in proptest::collection::vec(0usize..1000, 9),
        ) {
            for family in [Family::Path, Family::Star] {
                let g = generate(family, n, None).unwrap();
                check_radius(&MaximalMatching::new(g.clone()).unwrap(), &picks, &noise);
                check_radius(&DominantClique::new(g.clone()).unwrap(), &picks, &noise);
                check_radius(&ShortestPath::new(g, Some(NodeId(0))).unwrap(), &picks, &noise);
            }
            let g = generate(Family::Gnp { p: 0.4 }, n, Some(seed)).unwrap();
            check_radius(&MaximalMatching::new(g.clone()).unwrap(), &picks, &noise);
            if g.is_connected() {
                check_radius(&ShortestPath::new(g, Some(NodeId(n - 1))).unwrap(), &picks, &noise);
            }
        }
    }
}
