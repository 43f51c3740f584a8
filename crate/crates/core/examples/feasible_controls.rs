//! Show the admissible speed set and its regime for a few hand-built
//! states along the default loop.

use brt_sched::{feasible_controls, BusState, Scenario};

fn main() -> brt_sched::Result<()> {
    let scenario = Scenario::default();
    let base = BusState::<u32>::at_depot(&scenario.network, scenario.params.bus_capacity);

    let cases = [
        ("parked at the depot, k = 0", 0.0, 0.0, 0, 0),
        ("cruising mid-leg", 300.0, 1.0, 0, 60),
        ("top speed mid-leg", 300.0, 2.0, 0, 60),
        ("close to stop 2", 1190.0, 1.0, 1, 250),
        ("dwelling at stop 1 before departure", 600.0, 0.0, 1, 140),
        ("dwelling at stop 1 at departure", 600.0, 0.0, 1, 150),
    ];
    for (label, position, speed, recent, clock) in cases {
        let state = BusState {
            position,
            speed,
            recent_stop: recent,
            clock,
            ..base.clone()
        };
        let set = feasible_controls(&state, &scenario)?;
        println!("{label:<38} {:<11} {:?}", set.regime().as_str(), set.speeds());
    }
    Ok(())
}
