//! Bus state and its one-second transition: position, most recent stop,
//! available capacity, and the per-stop passenger queues.
//!
//! The state is generic over the passenger count type. Simulation uses
//! `u32`; the planner runs the same transition on `f64` counts so expected
//! arrivals can be carried through its look-ahead tree.

use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, Sub};

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::feasible_controls;
use crate::network::LoopNetwork;
use crate::params::{CapacityMode, ScenarioParams};
use crate::scenario::Scenario;

/// Passenger count: integral in simulation, fractional in the planner's
/// expectation model.
pub trait Count:
    Copy + PartialOrd + Debug + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + 'static
{
    fn from_u32(v: u32) -> Self;
    fn to_f64(self) -> f64;
    /// Hashable bit pattern used for memoization keys.
    fn key(self) -> u64;

    fn zero() -> Self {
        Self::default()
    }

    fn is_positive(self) -> bool {
        self > Self::zero()
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Count for u32 {
    fn from_u32(v: u32) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        f64::from(self)
    }

    fn key(self) -> u64 {
        u64::from(self)
    }
}

impl Count for f64 {
    fn from_u32(v: u32) -> Self {
        f64::from(v)
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn key(self) -> u64 {
        // -0.0 and 0.0 share a key
        (self + 0.0).to_bits()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BusState<Q = u32> {
    /// Meters from the depot along the loop.
    pub position: f64,
    /// Current speed: the control applied in the previous step.
    pub speed: f64,
    /// Most recent route stop served or passed; 0 is the depot.
    pub recent_stop: usize,
    pub capacity_free: Q,
    /// Waiting passengers per queue stop (street stops, then the depot).
    pub queues: Vec<Q>,
    /// Arrivals drawn in the previous step; they join the queues in the
    /// next transition.
    pub lagged_arrivals: Vec<Q>,
    /// Set when someone on board has requested the upcoming stop.
    pub alight_flag: bool,
    pub onboard: Q,
    pub clock: u32,
}

impl<Q: Count> BusState<Q> {
    /// Empty bus parked at the depot at `k = 0` with empty queues.
    pub fn at_depot(network: &LoopNetwork, capacity: u32) -> Self {
        let n = network.queue_stops();
        Self {
            position: 0.0,
            speed: 0.0,
            recent_stop: 0,
            capacity_free: Q::from_u32(capacity),
            queues: vec![Q::zero(); n],
            lagged_arrivals: vec![Q::zero(); n],
            alight_flag: false,
            onboard: Q::zero(),
            clock: 0,
        }
    }

    /// Copy of the state with fractional counts, for the planner.
    pub fn to_model(&self) -> BusState<f64> {
        BusState {
            position: self.position,
            speed: self.speed,
            recent_stop: self.recent_stop,
            capacity_free: self.capacity_free.to_f64(),
            queues: self.queues.iter().map(|q| q.to_f64()).collect(),
            lagged_arrivals: self.lagged_arrivals.iter().map(|q| q.to_f64()).collect(),
            alight_flag: self.alight_flag,
            onboard: self.onboard.to_f64(),
            clock: self.clock,
        }
    }

    pub fn queue_total(&self) -> f64 {
        self.queues.iter().map(|q| q.to_f64()).sum()
    }

    /// Queue at route stop `stop` (1-based), if that stop has one.
    pub fn queue_at(&self, stop: usize) -> Option<Q> {
        stop.checked_sub(1).and_then(|i| self.queues.get(i).copied())
    }

    pub fn key(&self, params: &ScenarioParams) -> StateKey {
        StateKey {
            position: params.position_index(self.position),
            speed: params.speed_index(self.speed),
            recent_stop: self.recent_stop,
            capacity_free: self.capacity_free.key(),
            queues: self.queues.iter().map(|q| q.key()).collect(),
            lagged: self.lagged_arrivals.iter().map(|q| q.key()).collect(),
            alight_flag: self.alight_flag,
            onboard: self.onboard.key(),
            clock: self.clock,
        }
    }
}

/// Exact identity of a state on the position and speed grids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateKey {
    position: i64,
    speed: i64,
    recent_stop: usize,
    capacity_free: u64,
    queues: Vec<u64>,
    lagged: Vec<u64>,
    alight_flag: bool,
    onboard: u64,
    clock: u32,
}

/// Random inputs of one step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disturbance<Q = u32> {
    /// New passengers appearing at each queue stop.
    pub arrivals: Vec<Q>,
    /// Passengers requesting the bus's upcoming stop, already limited to the
    /// number on board. Applied only in the step that enters that stop.
    pub alight: Q,
}

impl<Q: Count> Disturbance<Q> {
    pub fn none(queue_stops: usize) -> Self {
        Self {
            arrivals: vec![Q::zero(); queue_stops],
            alight: Q::zero(),
        }
    }
}

/// `P + u_next * c`.
pub fn step_position<Q>(state: &BusState<Q>, u_next: f64, traffic_factor: f64) -> f64 {
    state.position + u_next * traffic_factor
}

/// Most recent stop after the bus has moved to `state.position` with speed
/// `state.speed`. The upcoming stop is claimed when the bus is at rest inside
/// its window; a street stop whose window the bus has fully passed without
/// stopping is marked as passed.
pub fn step_recent_stop<Q>(state: &BusState<Q>, network: &LoopNetwork) -> usize {
    let next = state.recent_stop + 1;
    if next > network.depot_return() {
        return state.recent_stop;
    }
    let window = network.route_window(next);
    let claimed = window.contains(state.position) && state.speed == 0.0;
    let passed = next <= network.street_stops() && state.position >= window.end;
    if claimed || passed {
        next
    } else {
        state.recent_stop
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityUpdate<Q> {
    pub capacity_free: Q,
    pub boarded: Q,
}

/// Available capacity after one step at route stop `stop`.
///
/// A moving bus exchanges nobody. A stopped bus first releases `alight`
/// passengers, then boards `min(N(stop), l)` limited by the free seats.
pub fn step_capacity<Q: Count>(
    state: &BusState<Q>,
    u_next: f64,
    stop: usize,
    alight: Q,
    params: &ScenarioParams,
) -> Result<CapacityUpdate<Q>> {
    if alight > state.onboard {
        return Err(Error::InfeasibleDisturbance {
            alight: alight.to_f64(),
            onboard: state.onboard.to_f64(),
        });
    }
    if u_next > 0.0 {
        return Ok(CapacityUpdate {
            capacity_free: state.capacity_free,
            boarded: Q::zero(),
        });
    }
    let released = state.capacity_free + alight;
    let queue = state.queue_at(stop).unwrap_or_default();
    let boarded = queue
        .min_of(Q::from_u32(params.boarding_rate))
        .min_of(released.max_zero());
    let capacity = released - boarded;
    let max = Q::from_u32(params.bus_capacity);
    if capacity < Q::zero() || capacity > max {
        match params.capacity_mode {
            CapacityMode::Strict => {
                return Err(Error::CapacityOutOfRange {
                    value: capacity.to_f64(),
                    max: params.bus_capacity,
                })
            }
            CapacityMode::Lenient => {
                warn!("clamping available capacity {:?} into [0, {}]", capacity, params.bus_capacity);
                let clamped = if capacity < Q::zero() { Q::zero() } else { max };
                return Ok(CapacityUpdate {
                    capacity_free: clamped,
                    boarded,
                });
            }
        }
    }
    Ok(CapacityUpdate {
        capacity_free: capacity,
        boarded,
    })
}

trait MaxZero {
    fn max_zero(self) -> Self;
}

impl<Q: Count> MaxZero for Q {
    fn max_zero(self) -> Self {
        if self < Q::zero() {
            Q::zero()
        } else {
            self
        }
    }
}

/// Queues after one step: every stop gains its arrivals and the stop being
/// served (if any) loses the passengers who boarded.
pub fn step_queues<Q: Count>(
    queues: &[Q],
    arrivals: &[Q],
    serving: Option<usize>,
    boarded: Q,
) -> Result<Vec<Q>> {
    let mut next: Vec<Q> = queues.iter().zip(arrivals).map(|(&n, &g)| n + g).collect();
    match serving {
        Some(stop) if stop >= 1 && stop <= queues.len() => {
            let i = stop - 1;
            if boarded > queues[i] {
                return Err(Error::BoardingExceedsQueue {
                    boarded: boarded.to_f64(),
                    queue: queues[i].to_f64(),
                    stop,
                });
            }
            next[i] = next[i] - boarded;
        }
        _ if boarded.is_positive() => {
            return Err(Error::BoardingExceedsQueue {
                boarded: boarded.to_f64(),
                queue: 0.0,
                stop: serving.unwrap_or(0),
            })
        }
        _ => {}
    }
    Ok(next)
}

/// One-second transition `X_{k+1} = f(X_k, u, W_k)`; rejects controls
/// outside the feasible set.
pub fn transition<Q: Count>(
    state: &BusState<Q>,
    u_next: f64,
    dist: &Disturbance<Q>,
    scenario: &Scenario,
) -> Result<BusState<Q>> {
    let controls = feasible_controls(state, scenario)?;
    if !controls.contains(u_next) {
        return Err(Error::InfeasibleControl {
            speed: u_next,
            allowed: controls.speeds().to_vec(),
            regime: controls.regime().as_str(),
        });
    }
    advance(state, u_next, dist, scenario)
}

/// Transition without the feasibility check; callers must pass a control
/// taken from `feasible_controls`.
pub(crate) fn advance<Q: Count>(
    state: &BusState<Q>,
    u_next: f64,
    dist: &Disturbance<Q>,
    scenario: &Scenario,
) -> Result<BusState<Q>> {
    let network = &scenario.network;
    let params = &scenario.params;
    if dist.alight > state.onboard {
        return Err(Error::InfeasibleDisturbance {
            alight: dist.alight.to_f64(),
            onboard: state.onboard.to_f64(),
        });
    }

    let mut next = state.clone();
    next.position = step_position(state, u_next, params.traffic_factor);
    next.speed = u_next;
    next.recent_stop = step_recent_stop(&next, network);
    let entering = u_next == 0.0 && next.recent_stop != state.recent_stop;

    let alight = if entering && state.alight_flag {
        dist.alight
    } else {
        Q::zero()
    };
    let at_street_stop = u_next == 0.0
        && next.recent_stop >= 1
        && next.recent_stop <= network.street_stops();
    let stop = if at_street_stop { next.recent_stop } else { 0 };
    let update = step_capacity(state, u_next, stop, alight, params)?;

    next.queues = step_queues(
        &state.queues,
        &state.lagged_arrivals,
        at_street_stop.then_some(stop),
        update.boarded,
    )?;
    next.lagged_arrivals = dist.arrivals.clone();
    next.capacity_free = update.capacity_free;
    next.onboard = state.onboard - alight + update.boarded;
    if u_next > 0.0 {
        next.alight_flag = dist.alight.is_positive();
    }
    next.clock = state.clock + 1;
    Ok(next)
}
