use std::collections::HashMap;
use std::time::Instant;

use crate::dynamics::{BusState, Count, StateKey};
use crate::error::Result;
use crate::scenario::Scenario;

use super::{expand, PolicyDecision, SolverConfig};

/// Look-ahead planner that keeps its memo between decisions. Node values
/// depend only on the state and the remaining depth, so reuse is exact;
/// `dp_lookahead` is the one-shot form.
pub struct Planner<'a> {
    scenario: &'a Scenario,
    config: &'a SolverConfig,
    memo: HashMap<(StateKey, u32), f64>,
    nodes: u64,
}

impl<'a> Planner<'a> {
    pub fn new(config: &'a SolverConfig, scenario: &'a Scenario) -> Self {
        Self {
            scenario,
            config,
            memo: HashMap::new(),
            nodes: 0,
        }
    }

    pub fn decide<Q: Count>(&mut self, state: &BusState<Q>) -> Result<PolicyDecision> {
        let started = Instant::now();
        let root = state.to_model();
        let depth = self
            .config
            .lookahead
            .min(self.config.horizon.saturating_sub(root.clock))
            .max(1);
        self.nodes = 0;
        let (chosen_speed, predicted_cost) = self.best(&root, depth)?;
        Ok(PolicyDecision {
            chosen_speed,
            predicted_cost,
            expanded_nodes: self.nodes,
            solve_time_us: started.elapsed().as_micros() as u64,
        })
    }

    /// Minimum expected cost of the next `depth` steps from `state`.
    fn value(&mut self, state: &BusState<f64>, depth: u32) -> Result<f64> {
        let key = (state.key(&self.scenario.params), depth);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let (_, best) = self.best(state, depth)?;
        self.memo.insert(key, best);
        Ok(best)
    }

    fn best(&mut self, state: &BusState<f64>, depth: u32) -> Result<(f64, f64)> {
        self.nodes += 1;
        let mut best: Option<(f64, f64)> = None;
        for edge in expand(state, self.scenario, self.config)? {
            let tail = if edge.terminal || depth <= 1 {
                0.0
            } else {
                self.value(&edge.next, depth - 1)?
            };
            let total = edge.stage_cost + tail;
            if best.is_none_or(|(_, b)| total < b) {
                best = Some((edge.speed, total));
            }
        }
        Ok(best.expect("feasible sets are non-empty"))
    }
}

/// First control of the cheapest sequence over the next
/// `min(lookahead, horizon - k)` steps, with expected arrivals in place of
/// the random ones and zero cost beyond the tree.
pub fn dp_lookahead<Q: Count>(
    state: &BusState<Q>,
    config: &SolverConfig,
    scenario: &Scenario,
) -> Result<PolicyDecision> {
    Planner::new(config, scenario).decide(state)
}
