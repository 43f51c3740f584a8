//! Self-checks shared by the `verify` subcommand and the test suites: random
//! tiny scenarios, look-ahead vs oracle comparison, and an invariant fuzz.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::demand::{expected_disturbance, DemandSchedule, DiscreteCmf};
use crate::dynamics::{advance, BusState};
use crate::error::Result;
use crate::network::{LoopNetwork, Timetable, TimetableEntry};
use crate::params::{CapacityMode, ScenarioParams, Weights};
use crate::scenario::Scenario;
use crate::sim::{run_episode_with, EpisodeOptions, Policy};
use crate::solver::{exhaustive_oracle, Planner, SolverConfig, DEFAULT_NODE_BUDGET};

/// Random two-stop scenario on a loop of at most 400 m with a horizon of at
/// most 80 s. Arrivals are either always one passenger or one-or-two.
pub fn tiny_instance(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let loop_length = *[200.0, 250.0, 300.0, 350.0, 400.0].choose(&mut rng).unwrap();
        let s1 = 25.0 * rng.gen_range(2..(loop_length / 50.0) as u32) as f64;
        let s2 = s1 + 25.0 * rng.gen_range(2..((loop_length - s1) / 25.0) as u32 - 1) as f64;
        let Ok(network) = LoopNetwork::new(vec![s1, s2], 5.0, loop_length) else {
            continue;
        };
        let legs = [s1, s2 - s1, loop_length - s2];
        let mut entries = vec![TimetableEntry {
            arrival_s: 0,
            departure_s: 0,
        }];
        let mut t = 0;
        for leg in &legs[..2] {
            let arrival_s = t + (leg / 5.0).ceil() as u32 + rng.gen_range(0..=2);
            t = arrival_s + rng.gen_range(0..=4);
            entries.push(TimetableEntry {
                arrival_s,
                departure_s: t,
            });
        }
        let ret = t + (legs[2] / 5.0).ceil() as u32 + rng.gen_range(0..=2);
        if ret > 80 {
            continue;
        }
        let Ok(timetable) = Timetable::new(entries, ret) else {
            continue;
        };
        let weights = *[
            Weights::default(),
            Weights {
                queue: 1.0,
                schedule: 0.05,
                speed: 0.02,
            },
            Weights {
                queue: 0.5,
                schedule: 0.1,
                speed: 0.0,
            },
        ]
        .choose(&mut rng)
        .unwrap();
        let params = ScenarioParams {
            boarding_rate: rng.gen_range(1..=2),
            bus_capacity: *[2, 3, 40].choose(&mut rng).unwrap(),
            weights,
            capacity_mode: CapacityMode::Strict,
            ..ScenarioParams::default()
        };
        let arrival = if rng.gen_bool(0.5) {
            DiscreteCmf::new(vec![1.0])
        } else {
            DiscreteCmf::new(vec![*[0.25, 0.5, 0.75].choose(&mut rng).unwrap(), 1.0])
        }
        .expect("valid cmf");
        let demand = DemandSchedule::uniform(
            network.queue_stops(),
            *[10, 15, 20].choose(&mut rng).unwrap(),
            arrival,
            DiscreteCmf::default_alightings(),
        );
        match Scenario::new(network, timetable, params, demand) {
            Ok(s) => return s,
            Err(_) => continue,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equivalence {
    pub oracle_cost: f64,
    pub lookahead_cost: f64,
    pub oracle_actions: Vec<f64>,
    pub lookahead_actions: Vec<f64>,
    pub oracle_states: usize,
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        self.oracle_cost == self.lookahead_cost && self.oracle_actions == self.lookahead_actions
    }
}

/// Solves `scenario` from the depot with the oracle and with the look-ahead
/// planner at full depth. The planner's action sequence is obtained by
/// re-planning after every step of its own expected-value model.
pub fn oracle_equivalence(scenario: &Scenario) -> Result<Equivalence> {
    let horizon = scenario.horizon();
    let config = SolverConfig::new(horizon, horizon);
    let start = BusState::<f64>::at_depot(&scenario.network, scenario.params.bus_capacity);
    let oracle = exhaustive_oracle(&start, &config, scenario, DEFAULT_NODE_BUDGET)?;

    let mut planner = Planner::new(&config, scenario);
    let first = planner.decide(&start)?;
    let mut actions = Vec::new();
    let mut state = start;
    loop {
        let d = planner.decide(&state)?;
        actions.push(d.chosen_speed);
        let dist = expected_disturbance(state.clock, &state, &scenario.demand, config.expectation);
        state = advance(&state, d.chosen_speed, &dist, scenario)?;
        if scenario.network.is_home(state.position) || state.clock >= horizon {
            break;
        }
    }
    Ok(Equivalence {
        oracle_cost: oracle.cost,
        lookahead_cost: first.predicted_cost,
        oracle_actions: oracle.actions,
        lookahead_actions: actions,
        oracle_states: oracle.states,
    })
}

/// Scenario variant for invariant fuzzing: the default loop with random
/// boarding rate, capacity and demand cadence.
pub fn fuzz_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut s = Scenario::default();
    s.params.boarding_rate = rng.gen_range(1..=3);
    s.params.bus_capacity = *[3, 8, 40].choose(&mut rng).unwrap();
    s.demand.arrival_period = *[15, 30, 60].choose(&mut rng).unwrap();
    s
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct FuzzReport {
    pub episodes: usize,
    pub violations: Vec<String>,
}

/// Runs `episodes` seeded episodes alternating baseline and look-ahead
/// policies on fuzzed scenarios, collecting every invariant failure.
pub fn fuzz_episodes(episodes: usize, base_seed: u64) -> FuzzReport {
    let options = EpisodeOptions::default();
    let violations = (0..episodes as u64)
        .filter_map(|i| {
            let seed = base_seed.wrapping_add(i);
            let scenario = fuzz_scenario(seed);
            let policy = if i % 2 == 0 {
                Policy::Baseline
            } else {
                Policy::Dp {
                    lookahead: 4 + (i % 4) as u32,
                }
            };
            run_episode_with(&scenario, policy, seed, &options)
                .err()
                .map(|e| format!("{policy}: {e}"))
        })
        .collect();
    FuzzReport {
        episodes,
        violations,
    }
}
