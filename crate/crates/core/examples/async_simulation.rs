//! Seeded runs under the three read models and three schedulers. The same
//! seed always gives the same trace.
//!
//! ```bash
//! cargo run -p dagw --example async_simulation
//! ```

use dagw::algo::MaximalMatching;
use dagw::executor::{run, AsyncModel, NodePolicy, RunConfig, SchedulerKind};
use dagw::graph::{generate, Family};
use dagw::model::Algorithm;

fn main() {
    let mm = MaximalMatching::new(generate(Family::Path, 6, None).expect("n > 0")).expect("small graph");
    let models = [AsyncModel::Fresh, AsyncModel::Amr { channel_bound: 2 }, AsyncModel::Aa { window: 3 }];
    let schedulers = [SchedulerKind::Central, SchedulerKind::Distributed, SchedulerKind::Synchronous];
    for model in models {
        for scheduler in schedulers {
            let cfg = RunConfig { scheduler, policy: NodePolicy::Random, model, seed: 7, ..RunConfig::default() };
            let out = run(&mm, cfg, mm.default_init());
            println!(
                "{model:<8} {scheduler:<12} {:?}: {} moves, {} rounds, {} steps, optimal {}",
                out.verdict,
                out.trace.moves(),
                out.trace.rounds(),
                out.steps,
                mm.optimal(&out.final_state)
            );
        }
    }
}
