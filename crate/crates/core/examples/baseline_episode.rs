//! Run the timetable-following baseline for one seed and print the bus
//! position every 30 s.
//!
//! ```bash
//! cargo run --example baseline_episode -- 7
//! ```

use brt_sched::{run_episode, Policy, Scenario};

fn main() -> brt_sched::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let scenario = Scenario::default();
    let result = run_episode(&scenario, Policy::Baseline, seed)?;

    println!("{:>5} {:>9} {:>6} {:>4}  queues", "k", "position", "speed", "M");
    for row in result.trace.iter().filter(|r| r.k % 30 == 0) {
        println!(
            "{:>5} {:>9.1} {:>6.1} {:>4}  {:?}",
            row.k, row.position_m, row.speed, row.recent_stop, row.queues
        );
    }
    println!(
        "{:?} at k = {}; waiting area per stop {:?}",
        result.termination,
        result.final_k(),
        result.per_stop_area
    );
    Ok(())
}
