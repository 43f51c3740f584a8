//! Compare the look-ahead planner at full depth with the exhaustive oracle
//! on random two-stop instances.
//!
//! ```bash
//! cargo run --release --example oracle_check -- 10
//! ```

use brt_sched::verify::{oracle_equivalence, tiny_instance};

fn main() -> brt_sched::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    for seed in 0..n {
        let scenario = tiny_instance(seed);
        let eq = oracle_equivalence(&scenario)?;
        println!(
            "seed {seed:>3}: loop {:>4} m, T = {:>2} s, {:>6} states, cost {:>10.4} vs {:>10.4}, {}",
            scenario.network.loop_length(),
            scenario.horizon(),
            eq.oracle_states,
            eq.oracle_cost,
            eq.lookahead_cost,
            if eq.holds() { "match" } else { "MISMATCH" }
        );
    }
    Ok(())
}
