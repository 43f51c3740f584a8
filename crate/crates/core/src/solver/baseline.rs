use crate::dynamics::{BusState, Count};
use crate::error::Result;
use crate::feasibility::feasible_controls;
use crate::network::desired_position_unchecked;
use crate::scenario::Scenario;

/// Timetable follower: the feasible speed whose next position lands closest
/// to the desired position one second ahead; the lower speed on ties.
pub fn baseline_policy<Q: Count>(state: &BusState<Q>, scenario: &Scenario) -> Result<f64> {
    let controls = feasible_controls(state, scenario)?;
    let target = desired_position_unchecked(
        &scenario.timetable,
        &scenario.network,
        &scenario.params,
        state.clock + 1,
    );
    let c = scenario.params.traffic_factor;
    let mut best = (f64::INFINITY, 0.0);
    for &u in controls.speeds() {
        let gap = (state.position + u * c - target).abs();
        if gap < best.0 {
            best = (gap, u);
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::LoopNetwork;

    fn moving(position: f64, speed: f64, recent: usize, clock: u32) -> BusState<u32> {
        let mut s = BusState::at_depot(&LoopNetwork::default_loop(), 40);
        s.position = position;
        s.speed = speed;
        s.recent_stop = recent;
        s.clock = clock;
        s
    }

    #[test]
    fn on_schedule_keeps_nominal_speed() {
        let sc = Scenario::default();
        // pd(60) = 300, pd(61) = 305
        assert_eq!(baseline_policy(&moving(300.0, 1.0, 0, 60), &sc).unwrap(), 1.0);
    }

    #[test]
    fn behind_schedule_accelerates() {
        let sc = Scenario::default();
        assert_eq!(baseline_policy(&moving(280.0, 1.0, 0, 60), &sc).unwrap(), 1.5);
    }

    #[test]
    fn departs_on_time() {
        let sc = Scenario::default();
        let mut s = moving(600.0, 0.0, 1, 150);
        assert_eq!(baseline_policy(&s, &sc).unwrap(), 0.5);
        s.clock = 140;
        assert_eq!(baseline_policy(&s, &sc).unwrap(), 0.0);
    }
}
