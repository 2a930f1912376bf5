//! Exhaustive exploration of extended states (global state plus channel
//! contents) under AMR and AA.
//!
//! ```bash
//! cargo run -p dagw --example extended_exploration
//! ```

use dagw::algo::build;
use dagw::checker::verify::{verify, InitSpec, VerifyConfig};
use dagw::checker::explore::DEFAULT_BUDGET;
use dagw::executor::AsyncModel;
use dagw::graph::{fig1, fig3, fig4, generate, Family, NodeId};
use dagw::model::AlgoKind;

fn main() {
    let cases = [
        (AlgoKind::Dc, fig1(), AsyncModel::Aa { window: 2 }),
        (AlgoKind::Sp, fig3(), AsyncModel::Aa { window: 2 }),
        (AlgoKind::Mm, fig4(), AsyncModel::Amr { channel_bound: 1 }),
        (AlgoKind::Mm, generate(Family::Path, 4, None).expect("n > 0"), AsyncModel::Amr { channel_bound: 1 }),
    ];
    for (kind, graph, model) in cases {
        let name = graph.name().to_string();
        let algo = build(kind, graph, Some(NodeId(3))).expect("valid configuration");
        let cfg = VerifyConfig { model, init: InitSpec::Default, budget: DEFAULT_BUDGET, probes: false };
        let r = verify(algo.as_ref(), &cfg).report;
        println!(
            "{kind} on {name} under {model}: {} states, acyclic {}, {} sinks all optimal {}, ok {}",
            r.states, r.acyclic, r.sinks, r.all_sinks_optimal, r.ok
        );
    }
}
