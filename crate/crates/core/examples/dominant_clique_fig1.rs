//! Dominant clique on the three-node graph: state values of single nodes,
//! then every execution from `⟨{1},{2},{3}⟩`.
//!
//! ```bash
//! cargo run -p dagw --example dominant_clique_fig1
//! ```

use dagw::algo::DominantClique;
use dagw::checker::explore::{explore, FreshRelation, DEFAULT_BUDGET};
use dagw::checker::props::{annotate, check_acyclic};
use dagw::graph::{fig1, NodeId};
use dagw::model::{rank, AlgoKind, Algorithm, GlobalState, LocalState, NodeSet};

fn cliques(sets: &[&[usize]]) -> GlobalState {
    let locals = sets
        .iter()
        .map(|s| LocalState::Clique(s.iter().map(|&k| NodeId(k - 1)).collect::<NodeSet>()))
        .collect();
    GlobalState::new(AlgoKind::Dc, locals).expect("one tag")
}

fn main() {
    let dc = DominantClique::new(fig1()).expect("small degree");
    for (label, own) in [("{1,2}", &[1usize, 2][..]), ("{1}", &[1][..]), ("{2,3}", &[2, 3][..])] {
        let s = cliques(&[own, &[2], &[3]]);
        println!("v1 holding {label}: state value {}", dc.state_value(NodeId(0), &s));
    }

    let init = dc.default_init();
    println!("initial {init} with rank {}", rank(&dc, &init));
    let ts = explore(&FreshRelation::new(&dc), [init], DEFAULT_BUDGET).expect("tiny system");
    let ann = annotate(&ts, &dc);
    println!("{} states, {} edges, acyclic: {}", ts.len(), ts.edge_count(), check_acyclic(&ts).acyclic());
    for s in ts.sinks() {
        println!("sink {} rank {} optimal {}", ts.global(s), ann.rank[s], ann.optimal[s]);
    }
}
