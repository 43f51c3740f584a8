use std::collections::HashMap;

use serde::Serialize;

use crate::dynamics::{BusState, Count, StateKey};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

use super::{expand, SolverConfig};

pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolution {
    pub cost: f64,
    pub actions: Vec<f64>,
    /// Distinct states enumerated.
    pub states: usize,
}

struct Arc {
    speed: f64,
    stage_cost: f64,
    child: Option<usize>,
}

/// Exact minimum of the planner's expected-value model from `initial` to the
/// horizon `config.horizon`, by enumerating every reachable state layer by
/// layer and then running backward induction. `config.lookahead` is ignored.
pub fn exhaustive_oracle<Q: Count>(
    initial: &BusState<Q>,
    config: &SolverConfig,
    scenario: &Scenario,
    node_budget: usize,
) -> Result<OracleSolution> {
    let root = initial.to_model();
    if scenario.network.is_home(root.position) || root.clock >= config.horizon {
        return Ok(OracleSolution {
            cost: 0.0,
            actions: vec![0.0],
            states: 1,
        });
    }

    // forward pass: layers[t][i] lists the arcs of state i at depth t
    let mut layers: Vec<Vec<Vec<Arc>>> = Vec::new();
    let mut frontier = vec![root];
    let mut states = 1;
    while !frontier.is_empty() {
        let mut index: HashMap<StateKey, usize> = HashMap::new();
        let mut next_frontier = Vec::new();
        let mut layer = Vec::with_capacity(frontier.len());
        for state in &frontier {
            let mut arcs = Vec::new();
            for edge in expand(state, scenario, config)? {
                let child = if edge.terminal {
                    None
                } else {
                    let key = edge.next.key(&scenario.params);
                    let i = *index.entry(key).or_insert_with(|| {
                        next_frontier.push(edge.next.clone());
                        next_frontier.len() - 1
                    });
                    Some(i)
                };
                arcs.push(Arc {
                    speed: edge.speed,
                    stage_cost: edge.stage_cost,
                    child,
                });
            }
            layer.push(arcs);
        }
        states += next_frontier.len();
        if states > node_budget {
            return Err(Error::OracleTooLarge { budget: node_budget });
        }
        layers.push(layer);
        frontier = next_frontier;
    }

    // backward pass
    let mut below: Vec<f64> = Vec::new();
    let mut choices: Vec<Vec<usize>> = vec![Vec::new(); layers.len()];
    for (t, layer) in layers.iter().enumerate().rev() {
        let mut values = Vec::with_capacity(layer.len());
        for arcs in layer {
            let mut best = (f64::INFINITY, 0);
            for (a, arc) in arcs.iter().enumerate() {
                let tail = arc.child.map_or(0.0, |c| below[c]);
                let total = arc.stage_cost + tail;
                if total < best.0 {
                    best = (total, a);
                }
            }
            values.push(best.0);
            choices[t].push(best.1);
        }
        below = values;
    }

    let mut actions = Vec::new();
    let mut node = Some(0);
    let mut t = 0;
    while let Some(i) = node {
        let arc = &layers[t][i][choices[t][i]];
        actions.push(arc.speed);
        node = arc.child;
        t += 1;
    }
    Ok(OracleSolution {
        cost: below[0],
        actions,
        states,
    })
}
