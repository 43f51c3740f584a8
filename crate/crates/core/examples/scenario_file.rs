//! Load a scenario from TOML, here a shorter two-stop loop, and run both
//! policies on it.
//!
//! ```bash
//! cargo run --example scenario_file -- crates/core/scenarios/default.toml
//! ```

use brt_sched::{run_episode, Policy, Scenario};

const SHORT_LOOP: &str = r#"
[network]
stop_positions = [400.0, 800.0]
loop_length = 1200.0

[timetable]
leg_s = 80
dwell_s = 20

[demand]
arrival_period = 30
"#;

fn main() -> brt_sched::Result<()> {
    let scenario = match std::env::args().nth(1) {
        Some(path) => Scenario::load(path)?,
        None => Scenario::from_toml_str(SHORT_LOOP)?,
    };
    println!(
        "{} street stops, loop {} m, horizon {} s",
        scenario.network.street_stops(),
        scenario.network.loop_length(),
        scenario.horizon()
    );
    for policy in [Policy::Baseline, Policy::Dp { lookahead: 5 }] {
        let r = run_episode(&scenario, policy, 1)?;
        println!(
            "{policy:>8}: back at k = {}, total cost {:.2}, waiting area {:?}",
            r.final_k(),
            r.total_cost,
            r.per_stop_area
        );
    }
    Ok(())
}
