//! Starts from every state of the per-node domain product and checks that
//! only optimal states are terminal.
//!
//! ```bash
//! cargo run -p dagw --example self_stabilization_sweep
//! ```

use dagw::algo::{DominantClique, MaximalMatching};
use dagw::checker::explore::DEFAULT_BUDGET;
use dagw::checker::verify::{verify, InitSpec, VerifyConfig};
use dagw::executor::AsyncModel;
use dagw::graph::{fig1, fig4, generate, Family};
use dagw::model::{domain_product, Algorithm};

fn sweep(label: &str, algo: &dyn Algorithm) {
    let cfg = VerifyConfig { model: AsyncModel::Fresh, init: InitSpec::All, budget: DEFAULT_BUDGET, probes: false };
    let r = verify(algo, &cfg).report;
    println!(
        "{label}: {} initial states ({} in the product), {} reachable, {} sinks, all optimal {}",
        r.initial_states,
        domain_product(algo).size(),
        r.states,
        r.sinks,
        r.all_sinks_optimal
    );
}

fn main() {
    sweep("dc fig1, cliq within the closed neighborhood", &DominantClique::new(fig1()).expect("small"));
    sweep("dc fig1, cliq any subset of V", &DominantClique::with_any_subset(fig1()).expect("small"));
    sweep("mm path3", &MaximalMatching::new(generate(Family::Path, 3, None).expect("n > 0")).expect("small"));
    sweep("mm star4", &MaximalMatching::new(fig4()).expect("small"));
}
