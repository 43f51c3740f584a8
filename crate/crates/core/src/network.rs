//! Loop geometry, timetable, and the schedule-derived desired position.
//!
//! Stops are indexed along the route: index 0 is the depot at the start of
//! the lap, `1..=M` are the street stops, and `M + 1` is the depot again at
//! the end of the loop. Passenger queues exist for route stops `1..=M + 1`,
//! so the default four-stop scenario has three street stops plus the depot
//! return.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ScenarioParams;

/// Half-open detection interval `[start, end)` in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn contains(&self, position: f64) -> bool {
        self.start <= position && position < self.end
    }

    pub fn overlaps(&self, other: &Window) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopNetwork {
    stop_positions: Vec<f64>,
    delta: f64,
    loop_length: f64,
}

impl LoopNetwork {
    pub fn new(stop_positions: Vec<f64>, delta: f64, loop_length: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::validation("network.delta", "must be positive"));
        }
        if stop_positions.is_empty() {
            return Err(Error::validation(
                "network.stop_positions",
                "at least one stop is required",
            ));
        }
        if !(stop_positions[0] > 0.0) {
            return Err(Error::validation(
                "network.stop_positions",
                "first stop must lie beyond the depot (position > 0)",
            ));
        }
        if stop_positions[0] - delta < 0.0 {
            return Err(Error::validation(
                "network.stop_positions",
                "first stop window starts before the depot",
            ));
        }
        for pair in stop_positions.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::validation(
                    "network.stop_positions",
                    "positions must be strictly increasing",
                ));
            }
            if pair[1] - pair[0] < 2.0 * delta {
                return Err(Error::validation(
                    "network.stop_positions",
                    format!(
                        "detection windows of stops at {} and {} overlap",
                        pair[0], pair[1]
                    ),
                ));
            }
        }
        let last = *stop_positions.last().expect("non-empty");
        if last + delta > loop_length {
            return Err(Error::validation(
                "network.loop_length",
                "last stop window extends past the end of the loop",
            ));
        }
        if last + delta > loop_length - delta {
            return Err(Error::validation(
                "network.loop_length",
                "last stop window overlaps the depot-return window",
            ));
        }
        Ok(Self {
            stop_positions,
            delta,
            loop_length,
        })
    }

    /// The 2.4 km loop with street stops every 600 m and a 10 m stop length.
    pub fn default_loop() -> Self {
        Self::new(vec![600.0, 1200.0, 1800.0], 5.0, 2400.0).expect("default network is valid")
    }

    pub fn stop_positions(&self) -> &[f64] {
        &self.stop_positions
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn loop_length(&self) -> f64 {
        self.loop_length
    }

    /// Number of street stops `M`, excluding the depot.
    pub fn street_stops(&self) -> usize {
        self.stop_positions.len()
    }

    /// Number of stops with a passenger queue: the street stops plus the
    /// depot return.
    pub fn queue_stops(&self) -> usize {
        self.stop_positions.len() + 1
    }

    /// Route index of the depot return.
    pub fn depot_return(&self) -> usize {
        self.stop_positions.len() + 1
    }

    /// Position of route stop `index` (`0` and `M + 1` are the depot).
    pub fn route_position(&self, index: usize) -> f64 {
        match index {
            0 => 0.0,
            i if i <= self.stop_positions.len() => self.stop_positions[i - 1],
            _ => self.loop_length,
        }
    }

    /// Detection window of route stop `index` in `1..=M + 1`.
    pub fn route_window(&self, index: usize) -> Window {
        let center = self.route_position(index);
        Window {
            start: center - self.delta,
            end: center + self.delta,
        }
    }

    /// Detection window of stop `m`: `1..=M` for street stops, `0` for the
    /// depot-return window at the end of the loop.
    pub fn stop_window(&self, m: usize) -> Result<Window> {
        match m {
            0 => Ok(self.route_window(self.depot_return())),
            m if m <= self.stop_positions.len() => Ok(self.route_window(m)),
            _ => Err(Error::InvalidStop {
                index: m,
                stops: self.stop_positions.len(),
            }),
        }
    }

    /// True once the bus is inside the depot-return window.
    pub fn is_home(&self, position: f64) -> bool {
        self.route_window(self.depot_return()).contains(position)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimetableEntry {
    pub arrival_s: u32,
    pub departure_s: u32,
}

/// Scheduled arrival and departure per route stop. Entry 0 is the depot
/// departure; entries `1..=M` are the street stops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timetable {
    entries: Vec<TimetableEntry>,
    depot_return_s: u32,
}

impl Timetable {
    pub fn new(entries: Vec<TimetableEntry>, depot_return_s: u32) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::validation(
                "timetable.stops",
                "the depot departure entry is required",
            ));
        }
        for (m, e) in entries.iter().enumerate() {
            if e.arrival_s > e.departure_s {
                return Err(Error::validation(
                    format!("timetable.stops[{m}]"),
                    "arrival_s is later than departure_s",
                ));
            }
        }
        for (m, pair) in entries.windows(2).enumerate() {
            if pair[1].departure_s <= pair[0].departure_s {
                return Err(Error::validation(
                    format!("timetable.stops[{}]", m + 1),
                    "departure_s must be strictly increasing across stops",
                ));
            }
            if pair[1].arrival_s < pair[0].departure_s {
                return Err(Error::validation(
                    format!("timetable.stops[{}]", m + 1),
                    "arrival_s precedes the previous departure",
                ));
            }
        }
        let last = entries.last().expect("non-empty").departure_s;
        if depot_return_s < last {
            return Err(Error::validation(
                "timetable.depot_return_s",
                "must not precede the last departure",
            ));
        }
        Ok(Self {
            entries,
            depot_return_s,
        })
    }

    /// Depart the depot at 0 s, `leg_s` seconds between consecutive stops and
    /// `dwell_s` seconds at every street stop.
    pub fn uniform(street_stops: usize, leg_s: u32, dwell_s: u32) -> Result<Self> {
        let mut entries = vec![TimetableEntry {
            arrival_s: 0,
            departure_s: 0,
        }];
        let mut t = 0;
        for _ in 0..street_stops {
            let arrival_s = t + leg_s;
            t = arrival_s + dwell_s;
            entries.push(TimetableEntry {
                arrival_s,
                departure_s: t,
            });
        }
        Self::new(entries, t + leg_s)
    }

    /// 120 s legs and 30 s dwells over three street stops.
    pub fn default_schedule() -> Self {
        Self::uniform(3, 120, 30).expect("default timetable is valid")
    }

    pub fn entries(&self) -> &[TimetableEntry] {
        &self.entries
    }

    pub fn depot_return_s(&self) -> u32 {
        self.depot_return_s
    }

    /// Scheduled departure from route stop `m` in `0..=M`.
    pub fn departure(&self, m: usize) -> u32 {
        self.entries[m].departure_s
    }

    /// Scheduled arrival at route stop `m` in `0..=M + 1`.
    pub fn arrival(&self, m: usize) -> u32 {
        self.entries
            .get(m)
            .map(|e| e.arrival_s)
            .unwrap_or(self.depot_return_s)
    }

    pub(crate) fn check_against(&self, network: &LoopNetwork, nominal_speed: f64) -> Result<()> {
        if self.entries.len() != network.street_stops() + 1 {
            return Err(Error::validation(
                "timetable.stops",
                format!(
                    "expected {} entries (depot + {} stops), found {}",
                    network.street_stops() + 1,
                    network.street_stops(),
                    self.entries.len()
                ),
            ));
        }
        for m in 0..=network.street_stops() {
            let leg = network.route_position(m + 1) - network.route_position(m);
            let available = f64::from(self.arrival(m + 1) - self.departure(m));
            if leg > nominal_speed * available + 1e-9 {
                return Err(Error::validation(
                    format!("timetable.stops[{}]", m + 1),
                    format!(
                        "{leg} m leg cannot be covered in {available} s at the nominal {nominal_speed} m/s"
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Minimum on-schedule position at time `k`: parked at a stop between its
/// arrival and departure, moving at the nominal speed `ud_min * c` after each
/// departure and clamped at the next stop.
pub fn desired_position(
    timetable: &Timetable,
    network: &LoopNetwork,
    params: &ScenarioParams,
    k: u32,
) -> Result<f64> {
    let horizon = timetable.depot_return_s();
    if k > horizon {
        return Err(Error::OutOfRange { k, horizon });
    }
    Ok(desired_position_unchecked(timetable, network, params, k))
}

pub(crate) fn desired_position_unchecked(
    timetable: &Timetable,
    network: &LoopNetwork,
    params: &ScenarioParams,
    k: u32,
) -> f64 {
    let k = k.min(timetable.depot_return_s());
    let last = match timetable.entries().iter().rposition(|e| e.departure_s <= k) {
        Some(m) => m,
        None => return 0.0,
    };
    let from = network.route_position(last);
    let to = network.route_position(last + 1);
    if k >= timetable.arrival(last + 1) {
        return to;
    }
    let elapsed = f64::from(k - timetable.departure(last));
    (from + params.nominal_speed() * elapsed).min(to)
}

/// Round-trip horizon fixed before the trip starts: the scheduled return to
/// the depot.
pub fn observer_horizon(
    timetable: &Timetable,
    _network: &LoopNetwork,
    _params: &ScenarioParams,
) -> u32 {
    timetable.depot_return_s()
}
