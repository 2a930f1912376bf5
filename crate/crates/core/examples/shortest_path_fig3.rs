//! Shortest path on the weighted four-cycle towards `v4`: one synchronous
//! run, the explored system, and the all-zero start that never moves.
//!
//! ```bash
//! cargo run -p dagw --example shortest_path_fig3
//! ```

use dagw::algo::ShortestPath;
use dagw::checker::explore::{explore, FreshRelation, DEFAULT_BUDGET};
use dagw::checker::verify::sp_zero_probe;
use dagw::executor::{run, NodePolicy, RunConfig, SchedulerKind};
use dagw::graph::{fig3, NodeId};
use dagw::model::{enabled_nodes, Algorithm};

fn main() {
    let sp = ShortestPath::new(fig3(), Some(NodeId(3))).expect("connected");
    let cfg = RunConfig { scheduler: SchedulerKind::Synchronous, policy: NodePolicy::FixedOrder, ..RunConfig::default() };
    let out = run(&sp, cfg, sp.default_init());
    println!(
        "synchronous run: {:?} after {} moves in {} rounds, final {}",
        out.verdict,
        out.trace.moves(),
        out.trace.rounds(),
        out.final_state
    );

    let ts = explore(&FreshRelation::new(&sp), [sp.default_init()], DEFAULT_BUDGET).expect("tiny system");
    println!("{} states, {} edges", ts.len(), ts.edge_count());
    for s in ts.sinks() {
        println!("sink {} optimal {}", ts.global(s), sp.optimal(&ts.global(s)));
    }

    let zero = sp.zero_init();
    println!("zero start {zero}: enabled {:?}, optimal {}", enabled_nodes(&sp, &zero), sp.optimal(&zero));
    let probe = sp_zero_probe(&sp, DEFAULT_BUDGET);
    println!("{}: holds={} ({})", probe.name, probe.holds, probe.detail);
}
