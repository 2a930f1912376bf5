//! Longest explored execution against the move bounds, over every connected
//! graph on four nodes.
//!
//! ```bash
//! cargo run -p dagw --example move_bounds
//! ```

use dagw::algo::{DominantClique, MaximalMatching};
use dagw::checker::explore::{explore, FreshRelation, DEFAULT_BUDGET};
use dagw::checker::props::{check_acyclic, check_bounds};
use dagw::graph::connected_graphs;
use dagw::model::Algorithm;

fn report(algo: &dyn Algorithm) {
    let ts = explore(&FreshRelation::new(algo), [algo.default_init()], DEFAULT_BUDGET).expect("small system");
    let b = check_bounds(&ts, &check_acyclic(&ts), algo, true);
    let (name, bound) = b.algo_bound.clone().expect("dc and mm have one");
    println!(
        "{} m={} {}: longest {:?} per node {:?}, {name}={bound}, generic {}, holds {}",
        algo.kind(),
        algo.graph().m(),
        algo.graph().to_text().lines().skip(1).collect::<Vec<_>>().join(" "),
        b.longest_path_moves,
        b.per_node_max_moves,
        b.generic_bound,
        b.holds()
    );
}

fn main() {
    for g in connected_graphs(4) {
        report(&DominantClique::new(g.clone()).expect("small degree"));
        report(&MaximalMatching::new(g).expect("small graph"));
    }
}
