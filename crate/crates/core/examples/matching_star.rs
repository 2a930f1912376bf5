//! Maximal matching on the four-node star from all-⊤, with the rank after
//! every move of a central run.
//!
//! ```bash
//! cargo run -p dagw --example matching_star
//! ```

use dagw::algo::MaximalMatching;
use dagw::checker::explore::{explore, FreshRelation, DEFAULT_BUDGET};
use dagw::checker::props::annotate;
use dagw::executor::{run, RunConfig};
use dagw::graph::fig4;
use dagw::model::trace::Event;
use dagw::model::{rank, Algorithm};

fn main() {
    let mm = MaximalMatching::new(fig4()).expect("small graph");
    let init = mm.default_init();
    let mut ranks = vec![rank(&mm, &init).to_string()];
    let out = run(&mm, RunConfig { seed: 1, ..RunConfig::default() }, init.clone());
    ranks.extend(out.trace.events().iter().filter_map(|e| match e {
        Event::Rank { rank, .. } => Some(rank.to_string()),
        _ => None,
    }));
    println!("run: {} moves, ranks {}, final {}", out.trace.moves(), ranks.join(" -> "), out.final_state);
    println!("matched pairs: {:?}", mm.matched_pairs(&out.final_state));

    let ts = explore(&FreshRelation::new(&mm), [init], DEFAULT_BUDGET).expect("tiny system");
    let ann = annotate(&ts, &mm);
    for id in 0..ts.len() {
        println!("{} rank {}{}", ts.global(id), ann.rank[id], if ts.out_degree(id) == 0 { " (sink)" } else { "" });
    }
}
