//! Stage cost: waiting passengers, schedule deficit and speed deviation.

use serde::Serialize;

use crate::demand::{expected_arrivals, DemandSchedule};
use crate::dynamics::{BusState, Count};
use crate::error::{Error, Result};
use crate::network::desired_position_unchecked;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CostBreakdown {
    pub queue_term: f64,
    /// Signed: negative while the bus runs ahead of the desired position.
    pub schedule_term: f64,
    pub speed_term: f64,
    pub total: f64,
    /// 0 once the bus is parked back at the depot, 1 otherwise.
    pub depot_gate: u8,
}

impl CostBreakdown {
    fn add_bus(&mut self, schedule_term: f64, speed_term: f64, gate: u8) {
        self.schedule_term += schedule_term;
        self.speed_term += speed_term;
        self.depot_gate = self.depot_gate.max(gate);
    }

    fn finish(mut self) -> Self {
        self.total = self.queue_term + self.schedule_term + self.speed_term;
        self
    }
}

/// `(u - ud_min)^2 + (u - ud_max)^2`.
pub fn speed_deviation(u: f64, desired: (f64, f64)) -> f64 {
    (u - desired.0).powi(2) + (u - desired.1).powi(2)
}

fn bus_terms<Q: Count>(state: &BusState<Q>, k: u32, offset_s: u32, scenario: &Scenario) -> (f64, f64, u8) {
    let p = &scenario.params;
    let pd = desired_position_unchecked(
        &scenario.timetable,
        &scenario.network,
        p,
        k.saturating_sub(offset_s),
    );
    let parked = scenario.network.is_home(state.position) && state.speed == 0.0;
    let gate = u8::from(!parked);
    let schedule = p.weights.schedule * (pd - state.position);
    let speed = f64::from(gate) * p.weights.speed * speed_deviation(state.speed, p.desired_speed);
    (schedule, speed, gate)
}

/// Fleet stage cost at step `k`. Queues are shared and read from the first
/// bus; bus `h` follows the timetable shifted by `h` dispatch headways.
pub fn stage_cost<Q: Count>(states: &[BusState<Q>], k: u32, scenario: &Scenario) -> Result<CostBreakdown> {
    let fleet = scenario.params.fleet_size;
    if states.len() != fleet || fleet == 0 {
        return Err(Error::FleetMismatch {
            got: states.len(),
            expected: fleet,
        });
    }
    let mut out = CostBreakdown {
        queue_term: scenario.params.weights.queue * states[0].queue_total(),
        ..CostBreakdown::default()
    };
    for (h, state) in states.iter().enumerate() {
        let offset = h as u32 * scenario.params.dispatch_headway_s;
        let (s, v, g) = bus_terms(state, k, offset, scenario);
        out.add_bus(s, v, g);
    }
    Ok(out.finish())
}

/// Stage cost of a single bus.
pub fn bus_stage_cost<Q: Count>(state: &BusState<Q>, k: u32, scenario: &Scenario) -> CostBreakdown {
    let (s, v, g) = bus_terms(state, k, 0, scenario);
    let mut out = CostBreakdown {
        queue_term: scenario.params.weights.queue * state.queue_total(),
        ..CostBreakdown::default()
    };
    out.add_bus(s, v, g);
    out.finish()
}

/// Stage cost with every queue raised by its expected arrivals at step `k`.
/// The cost is affine in the queues, so this equals the expectation.
pub fn expected_stage_cost<Q: Count>(
    state: &BusState<Q>,
    k: u32,
    demand: &DemandSchedule,
    scenario: &Scenario,
) -> CostBreakdown {
    let extra: f64 = expected_arrivals(demand, k).iter().sum();
    let mut out = bus_stage_cost(state, k, scenario);
    out.queue_term += scenario.params.weights.queue * extra;
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::DiscreteCmf;
    use crate::network::LoopNetwork;

    fn bus(position: f64, speed: f64, queues: [u32; 4]) -> BusState<u32> {
        let mut s = BusState::at_depot(&LoopNetwork::default_loop(), 40);
        s.position = position;
        s.speed = speed;
        s.queues = queues.to_vec();
        s
    }

    #[test]
    fn worked_example() {
        let sc = Scenario::default();
        let k = 100;
        assert_eq!(desired_position_unchecked(&sc.timetable, &sc.network, &sc.params, k), 500.0);
        let c = stage_cost(&[bus(450.0, 2.0, [2, 0, 1, 0])], k, &sc).unwrap();
        assert_eq!(c.queue_term, 3.0);
        assert!((c.schedule_term - 5.0).abs() < 1e-12);
        assert!((c.speed_term - 0.0125).abs() < 1e-12);
        assert!((c.total - 8.0125).abs() < 1e-12);
        assert_eq!(c.depot_gate, 1);
    }

    #[test]
    fn parked_at_depot_costs_nothing() {
        let sc = Scenario::default();
        let c = bus_stage_cost(&bus(2400.0, 0.0, [0; 4]), 570, &sc);
        assert_eq!(c.total, 0.0);
        assert_eq!(c.depot_gate, 0);
    }

    #[test]
    fn speed_term_symmetric_minimum() {
        let sc = Scenario::default();
        let c = bus_stage_cost(&bus(0.0, 1.25, [0; 4]), 0, &sc);
        assert!((c.speed_term - 0.01 * 0.125).abs() < 1e-15);
        let grid = sc.params.speed_grid();
        let best = grid
            .iter()
            .map(|&u| speed_deviation(u, (1.0, 1.5)))
            .fold(f64::INFINITY, f64::min);
        // grid points 1.0 and 1.5 tie for the minimum
        assert_eq!(speed_deviation(1.0, (1.0, 1.5)), best);
        assert_eq!(speed_deviation(1.5, (1.0, 1.5)), best);
        assert_eq!(speed_deviation(1.2, (1.2, 1.2)), 0.0);
    }

    #[test]
    fn affine_in_queues() {
        let sc = Scenario::default();
        let base = bus_stage_cost(&bus(300.0, 1.0, [1, 2, 3, 4]), 60, &sc).total;
        for m in 0..4 {
            let mut q = [1, 2, 3, 4];
            q[m] += 1;
            let bumped = bus_stage_cost(&bus(300.0, 1.0, q), 60, &sc).total;
            assert!((bumped - base - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn expected_cost_adds_mean_arrivals() {
        let sc = Scenario::default();
        let s = bus(0.0, 0.0, [0; 4]);
        let e = expected_stage_cost(&s, 60, &sc.demand, &sc);
        let pmf = [0.14, 0.67, 0.16, 0.02, 0.01];
        let mean: f64 = pmf.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum();
        assert!((e.queue_term - 4.0 * mean).abs() < 1e-9);
        let off = expected_stage_cost(&s, 61, &sc.demand, &sc);
        assert_eq!(off, bus_stage_cost(&s, 61, &sc));
    }

    #[test]
    fn expected_cost_is_linear_in_mixtures() {
        let sc = Scenario::default();
        let s = bus(300.0, 1.0, [1, 0, 2, 0]);
        let d1 = DemandSchedule::uniform(4, 60, DiscreteCmf::new(vec![1.0]).unwrap(), DiscreteCmf::default_alightings());
        let d2 = DemandSchedule::uniform(4, 60, DiscreteCmf::new(vec![0.0, 0.0, 1.0]).unwrap(), DiscreteCmf::default_alightings());
        let mix = DemandSchedule::uniform(4, 60, DiscreteCmf::new(vec![0.5, 0.5, 1.0]).unwrap(), DiscreteCmf::default_alightings());
        let avg = 0.5 * (expected_stage_cost(&s, 120, &d1, &sc).total + expected_stage_cost(&s, 120, &d2, &sc).total);
        assert!((expected_stage_cost(&s, 120, &mix, &sc).total - avg).abs() < 1e-12);
    }

    #[test]
    fn fleet_terms() {
        let mut sc = Scenario::default();
        let s = bus(0.0, 0.0, [0; 4]);
        assert!(matches!(
            stage_cost(&[s.clone(), s.clone()], 0, &sc),
            Err(Error::FleetMismatch { got: 2, expected: 1 })
        ));
        sc.params.fleet_size = 2;
        sc.params.dispatch_headway_s = 60;
        // second bus dispatched 60 s later: pd(100) = 500, pd(40) = 200
        let c = stage_cost(&[bus(450.0, 1.0, [0; 4]), bus(150.0, 1.0, [0; 4])], 100, &sc).unwrap();
        assert!((c.schedule_term - 0.1 * (50.0 + 50.0)).abs() < 1e-9);
    }
}
