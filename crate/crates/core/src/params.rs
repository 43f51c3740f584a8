use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stage-cost weights: queue length, schedule deficit, speed deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub queue: f64,
    pub schedule: f64,
    pub speed: f64,
}

impl Weights {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            queue: self.queue * factor,
            schedule: self.schedule * factor,
            speed: self.speed * factor,
        }
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            queue: 1.0,
            schedule: 0.1,
            speed: 0.01,
        }
    }
}

/// What to do when an update would push available capacity outside
/// `[0, B_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapacityMode {
    #[default]
    Strict,
    Lenient,
}

/// Kinematic, passenger-exchange and cost parameters. Speeds are in speed
/// units; one unit moves the bus `traffic_factor` meters per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub traffic_factor: f64,
    pub speed_step: f64,
    pub max_speed: f64,
    /// Largest speed change per one-second step.
    pub lambda: f64,
    /// Passengers boarding per second of dwell.
    pub boarding_rate: u32,
    pub bus_capacity: u32,
    pub weights: Weights,
    pub desired_speed: (f64, f64),
    pub fleet_size: usize,
    /// Scheduled depot dispatch spacing between consecutive buses.
    pub dispatch_headway_s: u32,
    pub capacity_mode: CapacityMode,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            traffic_factor: 5.0,
            speed_step: 0.5,
            max_speed: 2.0,
            lambda: 0.5,
            boarding_rate: 1,
            bus_capacity: 40,
            weights: Weights::default(),
            desired_speed: (1.0, 1.5),
            fleet_size: 1,
            dispatch_headway_s: 0,
            capacity_mode: CapacityMode::Strict,
        }
    }
}

fn on_grid(value: f64, step: f64) -> bool {
    let q = value / step;
    (q - q.round()).abs() < 1e-9
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        let p = self;
        if !(p.traffic_factor > 0.0) || !p.traffic_factor.is_finite() {
            return Err(Error::validation("params.traffic_factor", "must be positive"));
        }
        if !(p.speed_step > 0.0) {
            return Err(Error::validation("params.speed_step", "must be positive"));
        }
        if !(p.max_speed > 0.0) || !on_grid(p.max_speed, p.speed_step) {
            return Err(Error::validation(
                "params.max_speed",
                "must be a positive multiple of speed_step",
            ));
        }
        if !(p.lambda > 0.0) || p.lambda > p.max_speed {
            return Err(Error::validation("params.lambda", "must satisfy 0 < lambda <= max_speed"));
        }
        if !on_grid(p.lambda, p.speed_step) {
            return Err(Error::validation("params.lambda", "must be a multiple of speed_step"));
        }
        if p.boarding_rate < 1 {
            return Err(Error::validation("params.boarding_rate", "must be at least 1"));
        }
        if p.bus_capacity < 1 {
            return Err(Error::validation("params.bus_capacity", "must be at least 1"));
        }
        let w = p.weights;
        for (name, v) in [
            ("params.weights.queue", w.queue),
            ("params.weights.schedule", w.schedule),
            ("params.weights.speed", w.speed),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::validation(name, "must be a non-negative number"));
            }
        }
        let (lo, hi) = p.desired_speed;
        if lo < p.speed_step {
            return Err(Error::validation("params.desired_speed", "lower bound below speed_step"));
        }
        if hi >= p.max_speed {
            return Err(Error::validation(
                "params.desired_speed",
                "upper bound must be below max_speed",
            ));
        }
        if lo > hi {
            return Err(Error::validation("params.desired_speed", "lower bound exceeds upper bound"));
        }
        if p.fleet_size < 1 {
            return Err(Error::validation("params.fleet_size", "must be at least 1"));
        }
        Ok(())
    }

    /// Speed matching the timetable: `ud_min * c` meters per second.
    pub fn nominal_speed(&self) -> f64 {
        self.desired_speed.0 * self.traffic_factor
    }

    /// Every speed in `{0, step, 2 step, ..., U}`.
    pub fn speed_grid(&self) -> Vec<f64> {
        let n = (self.max_speed / self.speed_step).round() as usize;
        (0..=n).map(|i| i as f64 * self.speed_step).collect()
    }

    pub fn is_grid_speed(&self, u: f64) -> bool {
        u >= 0.0 && u <= self.max_speed + 1e-9 && on_grid(u, self.speed_step)
    }

    /// Index of `u` on the speed grid.
    pub fn speed_index(&self, u: f64) -> i64 {
        (u / self.speed_step).round() as i64
    }

    /// Index of `position` on the `c * speed_step` position grid.
    pub fn position_index(&self, position: f64) -> i64 {
        (position / (self.traffic_factor * self.speed_step)).round() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = ScenarioParams::default();
        p.validate().unwrap();
        assert_eq!(p.nominal_speed(), 5.0);
        assert_eq!(p.speed_grid(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn first_violation_names_field() {
        let p = ScenarioParams {
            lambda: 3.0,
            ..ScenarioParams::default()
        };
        match p.validate() {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "params.lambda"),
            other => panic!("unexpected {other:?}"),
        }
        let p = ScenarioParams {
            desired_speed: (1.0, 2.0),
            ..ScenarioParams::default()
        };
        assert!(p.validate().is_err());
        let p = ScenarioParams {
            traffic_factor: 0.0,
            ..ScenarioParams::default()
        };
        assert!(p.validate().is_err());
    }
}
