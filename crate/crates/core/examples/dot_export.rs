//! Writes the explored matching system as Graphviz to standard output.
//!
//! ```bash
//! cargo run -p dagw --example dot_export | dot -Tsvg > star4.svg
//! ```

use dagw::algo::MaximalMatching;
use dagw::checker::dot::to_dot;
use dagw::checker::explore::{explore, FreshRelation, DEFAULT_BUDGET};
use dagw::checker::props::annotate;
use dagw::graph::fig4;
use dagw::model::Algorithm;

fn main() {
    let mm = MaximalMatching::new(fig4()).expect("small graph");
    let ts = explore(&FreshRelation::new(&mm), [mm.default_init()], DEFAULT_BUDGET).expect("tiny system");
    let ann = annotate(&ts, &mm);
    print!("{}", to_dot(&ts, "star4", Some(&ann.rank)));
}
