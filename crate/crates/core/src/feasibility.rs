//! Feasible speed sets.
//!
//! Regimes are resolved in priority order: stop, dwell-hold, depart,
//! approach, cruise. The approach regime and the acceleration filter in the
//! cruise regime together keep the bus inside a braking envelope, so it
//! always reaches the next detection window at the crawl speed `lambda` and
//! can stop there with a single `lambda` step.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{BusState, Count};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Cruise,
    Approach,
    Stop,
    Depart,
    DwellHold,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Cruise => "cruise",
            Regime::Approach => "approach",
            Regime::Stop => "stop",
            Regime::Depart => "depart",
            Regime::DwellHold => "dwell-hold",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "cruise" => Regime::Cruise,
            "approach" => Regime::Approach,
            "stop" => Regime::Stop,
            "depart" => Regime::Depart,
            "dwell-hold" => Regime::DwellHold,
            _ => return None,
        })
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Non-empty ascending set of admissible next speeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlSet {
    speeds: Vec<f64>,
    regime: Regime,
}

impl ControlSet {
    fn new(speeds: Vec<f64>, regime: Regime, k: u32) -> Result<Self> {
        if speeds.is_empty() {
            return Err(Error::EmptyControlSet { k });
        }
        debug_assert!(speeds.windows(2).all(|w| w[0] < w[1]));
        Ok(Self { speeds, regime })
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn contains(&self, u: f64) -> bool {
        self.speeds.iter().any(|&s| (s - u).abs() < 1e-9)
    }

    pub fn max(&self) -> f64 {
        *self.speeds.last().expect("non-empty")
    }
}

/// Distance covered while ramping down from `u` in steps of `lambda`:
/// `c * (u + (u - lambda) + ... )` over the positive terms.
pub fn braking_distance(u: f64, lambda: f64, traffic_factor: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut v = u;
    while v > 1e-9 {
        total += v;
        v -= lambda;
    }
    traffic_factor * total
}

/// Whether the bus must stop at its upcoming stop `target`: always at the
/// depot; at a street stop when someone wants to get off, or when people
/// are waiting and there is room.
fn must_stop<Q: Count>(state: &BusState<Q>, scenario: &Scenario, target: usize) -> bool {
    if target == scenario.network.depot_return() {
        return true;
    }
    let waiting = state.queue_at(target).is_some_and(Count::is_positive);
    state.alight_flag || (waiting && state.capacity_free.is_positive())
}

pub fn feasible_controls<Q: Count>(state: &BusState<Q>, scenario: &Scenario) -> Result<ControlSet> {
    let network = &scenario.network;
    let params = &scenario.params;
    let timetable = &scenario.timetable;
    let lambda = params.lambda;
    let c = params.traffic_factor;
    let u = state.speed;
    let k = state.clock;

    if network.is_home(state.position) {
        return ControlSet::new(vec![0.0], Regime::Stop, k);
    }

    let target = state.recent_stop + 1;
    let window = network.route_window(target);
    if window.contains(state.position) && must_stop(state, scenario, target) {
        return ControlSet::new(vec![0.0], Regime::Stop, k);
    }

    if u == 0.0 {
        let stop = state.recent_stop;
        let departure = timetable.departure(stop);
        let emptied = stop == 0
            || state.queue_at(stop).is_none_or(|n| !n.is_positive())
            || !state.capacity_free.is_positive();
        if k == departure || (k >= departure && emptied) {
            return ControlSet::new(vec![lambda], Regime::Depart, k);
        }
        return ControlSet::new(vec![0.0], Regime::DwellHold, k);
    }

    let gap = window.start - state.position;
    if gap <= braking_distance(u, lambda, c) {
        return ControlSet::new(vec![(u - lambda).max(lambda)], Regime::Approach, k);
    }

    let speeds = [u - lambda, u, u + lambda]
        .into_iter()
        .filter(|&v| v > 1e-9 && v <= params.max_speed + 1e-9)
        .filter(|&v| v <= lambda + 1e-9 || gap > braking_distance(v, lambda, c))
        .collect();
    ControlSet::new(speeds, Regime::Cruise, k)
}
