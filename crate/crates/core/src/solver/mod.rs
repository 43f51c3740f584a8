//! Speed policies: the rolling look-ahead dynamic program, an exhaustive
//! oracle used to check it, and a timetable-following baseline.

mod baseline;
mod lookahead;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::demand::{expected_disturbance, ExpectationMode};
use crate::dynamics::{advance, BusState};
use crate::error::Result;
use crate::feasibility::feasible_controls;
use crate::scenario::Scenario;

pub use baseline::baseline_policy;
pub use lookahead::{dp_lookahead, Planner};
pub use oracle::{exhaustive_oracle, OracleSolution, DEFAULT_NODE_BUDGET};

/// Order in which equal-cost controls are considered; the first one wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Lowest speed first.
    #[default]
    LowerSpeed,
    /// Current speed first, then the lowest.
    HoldSpeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Tree depth in one-second steps.
    pub lookahead: u32,
    pub horizon: u32,
    pub tie_break: TieBreak,
    pub expectation: ExpectationMode,
}

impl SolverConfig {
    pub fn new(lookahead: u32, horizon: u32) -> Self {
        Self {
            lookahead,
            horizon,
            tie_break: TieBreak::LowerSpeed,
            expectation: ExpectationMode::ClosedForm,
        }
    }

    pub fn for_scenario(lookahead: u32, scenario: &Scenario) -> Self {
        Self::new(lookahead, scenario.horizon())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyDecision {
    pub chosen_speed: f64,
    /// Expected cost of the best control sequence found.
    pub predicted_cost: f64,
    /// Tree nodes evaluated, memo hits excluded; at least 1.
    pub expanded_nodes: u64,
    pub solve_time_us: u64,
}

/// One outgoing edge of a planner node.
#[derive(Debug, Clone)]
pub(crate) struct Edge {
    pub speed: f64,
    pub stage_cost: f64,
    pub next: BusState<f64>,
    /// The successor is home or at the end of the horizon.
    pub terminal: bool,
}

/// Feasible controls of `state` in tie-break order.
pub(crate) fn ordered_controls(state: &BusState<f64>, scenario: &Scenario, tie: TieBreak) -> Result<Vec<f64>> {
    let set = feasible_controls(state, scenario)?;
    let mut speeds = set.speeds().to_vec();
    if tie == TieBreak::HoldSpeed {
        if let Some(i) = speeds.iter().position(|&u| u == state.speed) {
            let hold = speeds.remove(i);
            speeds.insert(0, hold);
        }
    }
    Ok(speeds)
}

/// Expanded successors of `state` under the planner's expected-value model.
pub(crate) fn expand(
    state: &BusState<f64>,
    scenario: &Scenario,
    config: &SolverConfig,
) -> Result<Vec<Edge>> {
    let dist = expected_disturbance(state.clock, state, &scenario.demand, config.expectation);
    ordered_controls(state, scenario, config.tie_break)?
        .into_iter()
        .map(|u| {
            let next = advance(state, u, &dist, scenario)?;
            let stage_cost = crate::cost::bus_stage_cost(&next, next.clock, scenario).total;
            let terminal = scenario.network.is_home(next.position) || next.clock >= config.horizon;
            Ok(Edge {
                speed: u,
                stage_cost,
                next,
                terminal,
            })
        })
        .collect()
}
