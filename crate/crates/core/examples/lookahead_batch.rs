//! Paired batch over look-ahead depths 4 to 9, the experiment behind the
//! waiting-area comparison, written to `out/example_batch`.
//!
//! ```bash
//! cargo run --release --example lookahead_batch
//! ```

use std::path::Path;

use brt_sched::sim::emit;
use brt_sched::{run_batch, BatchConfig, Scenario};

fn main() -> brt_sched::Result<()> {
    let scenario = Scenario::default();
    let config = BatchConfig::new((4..=9).collect(), 20, 0);
    let summary = run_batch(&scenario, &config)?;

    println!("baseline mean area {:?}", summary.baseline.mean);
    for la in &summary.lookaheads {
        println!(
            "LA {}: area {:?}, improvement {:.1?} %, {:.1} us/step, {:.1} nodes/step",
            la.lookahead, la.area.mean, la.improvement_pct, la.timing_mean_us, la.mean_expanded_nodes
        );
    }

    let out = Path::new("out/example_batch");
    emit::write_runs_jsonl(&summary.records, &out.join("runs.jsonl"))?;
    emit::write_batch_csv(&summary, scenario.network.queue_stops(), &out.join("batch.csv"))?;
    println!("wrote {}", out.display());
    Ok(())
}
