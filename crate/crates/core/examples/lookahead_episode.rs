//! Drive the bus with the look-ahead policy and compare it with the
//! baseline on the same passenger demand.
//!
//! ```bash
//! cargo run --release --example lookahead_episode -- 5 11
//! ```

use brt_sched::{run_episode, Policy, Scenario};

fn main() -> brt_sched::Result<()> {
    let mut args = std::env::args().skip(1);
    let lookahead = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(11);
    let scenario = Scenario::default();

    let dp = run_episode(&scenario, Policy::Dp { lookahead }, seed)?;
    let base = run_episode(&scenario, Policy::Baseline, seed)?;

    // arrival times at each street stop
    for m in 1..=scenario.network.street_stops() {
        let at = |trace: &[brt_sched::sim::TraceRow]| {
            trace.iter().find(|r| r.recent_stop == m).map(|r| r.k)
        };
        println!(
            "stop {m}: dp arrives at {:?} s, baseline at {:?} s (scheduled {} s)",
            at(&dp.trace),
            at(&base.trace),
            scenario.timetable.arrival(m)
        );
    }
    for (m, (d, b)) in dp.per_stop_area.iter().zip(&base.per_stop_area).enumerate() {
        println!("stop {}: waiting area {d} vs {b} passenger-seconds", m + 1);
    }
    println!(
        "dp back at k = {}, mean solve {:.1} us, mean nodes {:.1}",
        dp.final_k(),
        dp.mean_solve_us(),
        dp.mean_expanded_nodes()
    );
    Ok(())
}
