use log::debug;

use crate::cost::bus_stage_cost;
use crate::demand::{disturbance_at, DemandStream};
use crate::dynamics::{transition, BusState};
use crate::error::{Error, Result};
use crate::feasibility::feasible_controls;
use crate::scenario::Scenario;
use crate::solver::{baseline_policy, dp_lookahead, SolverConfig};

use super::invariants::check_step;
use super::metrics::waiting_area;
use super::{EpisodeOptions, EpisodeResult, Policy, Termination, TimingMode, TraceRow};

pub fn run_episode(scenario: &Scenario, policy: Policy, seed: u64) -> Result<EpisodeResult> {
    run_episode_with(scenario, policy, seed, &EpisodeOptions::default())
}

/// Runs one loop from the depot until the bus is back or the horizon is
/// reached. Errors carry the seed.
pub fn run_episode_with(
    scenario: &Scenario,
    policy: Policy,
    seed: u64,
    options: &EpisodeOptions,
) -> Result<EpisodeResult> {
    simulate(scenario, policy, seed, options).map_err(|e| Error::Episode {
        seed,
        source: Box::new(e),
    })
}

fn simulate(
    scenario: &Scenario,
    policy: Policy,
    seed: u64,
    options: &EpisodeOptions,
) -> Result<EpisodeResult> {
    scenario.validate()?;
    let horizon = scenario.horizon();
    let stream = DemandStream::new(seed);
    let solver = policy.lookahead().map(|la| SolverConfig {
        lookahead: la,
        horizon,
        tie_break: options.tie_break,
        expectation: options.expectation,
    });

    let mut state: BusState<u32> = BusState::at_depot(&scenario.network, scenario.params.bus_capacity);
    let mut trace = Vec::with_capacity(horizon as usize + 1);
    let mut step_timings = Vec::new();
    let mut expanded_nodes = Vec::new();
    let mut arrival_log = Vec::new();
    let mut truncations = 0;

    let termination = loop {
        let k = state.clock;
        let controls = feasible_controls(&state, scenario)?;
        let row = |solve_us| TraceRow {
            k,
            position_m: state.position,
            speed: state.speed,
            recent_stop: state.recent_stop,
            capacity_free: state.capacity_free,
            queues: state.queues.clone(),
            stage_cost: bus_stage_cost(&state, k, scenario).total,
            regime: controls.regime(),
            solve_us,
        };
        if scenario.network.is_home(state.position) {
            trace.push(row(0));
            break Termination::Returned;
        }
        if k >= horizon {
            trace.push(row(0));
            break Termination::HorizonExhausted;
        }

        let (u, solve_us) = match &solver {
            None => (baseline_policy(&state, scenario)?, 0),
            Some(cfg) => {
                let d = dp_lookahead(&state, cfg, scenario)?;
                expanded_nodes.push(d.expanded_nodes);
                (d.chosen_speed, d.solve_time_us)
            }
        };
        let solve_us = match options.timing {
            TimingMode::Measured => solve_us,
            TimingMode::Disabled => 0,
        };
        if solver.is_some() {
            step_timings.push(solve_us);
        }
        trace.push(row(solve_us));

        let sample = disturbance_at(k, &state, &scenario.demand, &scenario.network, &stream);
        if scenario.demand.is_arrival_step(k) {
            arrival_log.push((k, sample.disturbance.arrivals.clone()));
        }
        let next = transition(&state, u, &sample.disturbance, scenario)?;
        let entered = u == 0.0 && next.recent_stop != state.recent_stop;
        if entered && state.alight_flag && sample.raw_alight > sample.disturbance.alight {
            truncations += 1;
        }
        if options.check_invariants {
            check_step(&state, u, &sample.disturbance, &next, scenario)?;
        }
        debug!("k={k} P={} u={u} M={}", state.position, state.recent_stop);
        state = next;
    };

    let per_stop_area = (1..=scenario.network.queue_stops())
        .map(|m| waiting_area(&trace, m))
        .collect();
    let total_cost = trace.iter().map(|r| r.stage_cost).sum();
    Ok(EpisodeResult {
        policy,
        seed,
        trace,
        per_stop_area,
        total_cost,
        step_timings,
        expanded_nodes,
        termination,
        truncations,
        arrival_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::DemandSchedule;

    #[test]
    fn baseline_returns_on_time() {
        let sc = Scenario::default();
        let r = run_episode(&sc, Policy::Baseline, 1).unwrap();
        assert_eq!(r.termination, Termination::Returned);
        assert!((540..=600).contains(&r.final_k()), "{}", r.final_k());
        assert!(r.trace.len() <= 601);
    }

    #[test]
    fn no_demand_no_waiting() {
        let mut sc = Scenario::default();
        sc.demand = DemandSchedule {
            arrival_period: 10_000,
            ..sc.demand.clone()
        };
        let r = run_episode(&sc, Policy::Dp { lookahead: 5 }, 3).unwrap();
        assert_eq!(r.per_stop_area, vec![0.0; 4]);
    }

    #[test]
    fn same_seed_same_arrivals() {
        let sc = Scenario::default();
        let a = run_episode(&sc, Policy::Baseline, 9).unwrap();
        let b = run_episode(&sc, Policy::Dp { lookahead: 4 }, 9).unwrap();
        let common = a.final_k().min(b.final_k());
        assert_eq!(a.arrival_digest(common), b.arrival_digest(common));
    }
}
