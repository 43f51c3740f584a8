use crate::dynamics::{BusState, Disturbance};
use crate::error::{Error, Result};
use crate::feasibility::feasible_controls;
use crate::scenario::Scenario;

const EPS: f64 = 1e-9;

/// Checks one realized step `state --u--> next`:
///
/// - the control is feasible and changes speed by at most `lambda`;
/// - a parked bus leaves no earlier than its scheduled departure;
/// - the position advances by exactly `u * c`;
/// - free seats stay in `[0, B_max]` and free plus occupied seats equal
///   `B_max`;
/// - passengers are conserved: everyone who joins a queue is either still
///   waiting or on board unless they got off at the stop just entered.
pub fn check_step(
    state: &BusState<u32>,
    u: f64,
    dist: &Disturbance<u32>,
    next: &BusState<u32>,
    scenario: &Scenario,
) -> Result<()> {
    let k = state.clock;
    let fail = |detail: String| Err(Error::Invariant { k, detail });
    let p = &scenario.params;

    let controls = feasible_controls(state, scenario)?;
    if !controls.contains(u) {
        return fail(format!("speed {u} outside {:?}", controls.speeds()));
    }
    if (u - state.speed).abs() > p.lambda + EPS {
        return fail(format!("speed jump {} -> {u}", state.speed));
    }
    if state.speed == 0.0 && u > 0.0 {
        let due = scenario.timetable.departure(state.recent_stop);
        if k < due {
            return fail(format!("left stop {} at {k} s, scheduled {due} s", state.recent_stop));
        }
    }
    let moved = next.position - state.position;
    if (moved - u * p.traffic_factor).abs() > EPS {
        return fail(format!("moved {moved} m at speed {u}"));
    }
    if next.capacity_free > p.bus_capacity {
        return fail(format!("free capacity {} above {}", next.capacity_free, p.bus_capacity));
    }
    if next.capacity_free + next.onboard != p.bus_capacity {
        return fail(format!(
            "{} free + {} on board != {}",
            next.capacity_free, next.onboard, p.bus_capacity
        ));
    }

    let before = i64::from(state.queues.iter().sum::<u32>()) + i64::from(state.onboard);
    let after = i64::from(next.queues.iter().sum::<u32>()) + i64::from(next.onboard);
    let joined = i64::from(state.lagged_arrivals.iter().sum::<u32>());
    let left = before + joined - after;
    let alight = i64::from(dist.alight);
    let ok = left == 0 || (left == alight && u == 0.0);
    if !ok {
        return fail(format!(
            "passenger ledger off by {left} (joined {joined}, alighting demand {alight})"
        ));
    }
    Ok(())
}
