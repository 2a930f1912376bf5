//! Searches for the failure of maximal matching under arbitrary staleness,
//! and shows the persistence witness on a three-node path.
//!
//! ```bash
//! cargo run -p dagw --example matching_aa_probe
//! ```

use dagw::algo::MaximalMatching;
use dagw::checker::explore::{explore, FreshRelation, DEFAULT_BUDGET};
use dagw::checker::props::{annotate, check_dag_inducing, OptimalReference};
use dagw::checker::verdict::Expectation;
use dagw::checker::verify::mm_aa_probe;
use dagw::graph::{fig4, generate, Family, NodeId};
use dagw::model::domain_product;

fn main() {
    let graphs = [fig4(), generate(Family::Path, 4, None).expect("n > 0")];
    for g in graphs {
        let mm = MaximalMatching::new(g).expect("small graph");
        for all in [false, true] {
            let p = mm_aa_probe(&mm, 2, all, DEFAULT_BUDGET);
            println!(
                "{} window 2, {} start: {:?} over {} states, replayed {}",
                p.graph,
                if all { "every" } else { "all-⊤" },
                p.classification,
                p.states,
                p.replayed
            );
            if let Some(c) = &p.counterexample {
                println!("  {}", c.states.join(" -> "));
            }
        }
    }

    // Highest id first so the witness sits on the first node.
    let mut path = generate(Family::Path, 3, None).expect("n > 0");
    for (i, id) in [12, 11, 10].into_iter().enumerate() {
        path.set_id(NodeId(i), id).expect("distinct ids");
    }
    let mm = MaximalMatching::new(path).expect("small graph");
    let ts = explore(&FreshRelation::new(&mm), domain_product(&mm), DEFAULT_BUDGET).expect("small system");
    let ann = annotate(&ts, &mm);
    let dag = check_dag_inducing(&ts, &ann, &mm, OptimalReference::DomainProduct, Expectation::Fail);
    println!("{}: holds {} ({})", dag.persistence.name, dag.persistence.holds, dag.persistence.detail);
}
