//! Builds ranks from an acyclic explored system alone: 0 at sinks and
//! `n + max(successor rank)` elsewhere, then compares with the hand-written
//! ranks of the algorithm.
//!
//! ```bash
//! cargo run -p dagw --example rank_construction
//! ```

use dagw::algo::MaximalMatching;
use dagw::checker::explore::{explore, FreshRelation, DEFAULT_BUDGET};
use dagw::checker::props::{annotate, check_acyclic, check_induced, induce_order};
use dagw::graph::fig4;
use dagw::model::Algorithm;

fn main() {
    let mm = MaximalMatching::new(fig4()).expect("small graph");
    let ts = explore(&FreshRelation::new(&mm), [mm.default_init()], DEFAULT_BUDGET).expect("tiny system");
    let ann = annotate(&ts, &mm);
    let acyc = check_acyclic(&ts);
    let order = induce_order(&ts, &acyc, &ann.optimal, mm.graph().n()).expect("acyclic with optimal sinks");
    for id in 0..ts.len() {
        println!(
            "{} induced rank {} (per node {}), algorithm rank {}",
            ts.global(id),
            order.rank[id],
            order.node_value(id),
            ann.rank[id]
        );
    }
    let v = check_induced(&ts, &order);
    println!("{}: {}", v.name, v.detail);
}
