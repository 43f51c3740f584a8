//! A validated scenario bundle and its TOML file format.
//!
//! Every section and field is optional; anything left out takes the value of
//! the default four-stop scenario. See `scenarios/default.toml` for the full
//! schema with comments.

use std::path::Path;

use serde::Deserialize;

use crate::demand::{DemandSchedule, DiscreteCmf};
use crate::error::{Error, Result};
use crate::network::{LoopNetwork, Timetable, TimetableEntry};
use crate::params::{CapacityMode, ScenarioParams, Weights};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: LoopNetwork,
    pub timetable: Timetable,
    pub params: ScenarioParams,
    pub demand: DemandSchedule,
}

impl Default for Scenario {
    fn default() -> Self {
        let network = LoopNetwork::default_loop();
        let demand = DemandSchedule::default_for(&network);
        Self {
            network,
            timetable: Timetable::default_schedule(),
            params: ScenarioParams::default(),
            demand,
        }
    }
}

impl Scenario {
    pub fn new(
        network: LoopNetwork,
        timetable: Timetable,
        params: ScenarioParams,
        demand: DemandSchedule,
    ) -> Result<Self> {
        let s = Self {
            network,
            timetable,
            params,
            demand,
        };
        s.validate()?;
        Ok(s)
    }

    /// Checks cross-component invariants; reports the first violation.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.timetable
            .check_against(&self.network, self.params.nominal_speed())?;
        self.demand.validate(&self.network)?;
        Ok(())
    }

    pub fn horizon(&self) -> u32 {
        crate::network::observer_horizon(&self.timetable, &self.network, &self.params)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Parse {
            path: "<scenario>".into(),
            message: e.to_string(),
        })?;
        raw.build()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: RawScenario = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        raw.build()
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    network: RawNetwork,
    #[serde(default)]
    timetable: RawTimetable,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    demand: RawDemand,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    stop_positions: Option<Vec<f64>>,
    delta: Option<f64>,
    loop_length: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTimetable {
    stops: Option<Vec<TimetableEntry>>,
    depot_return_s: Option<u32>,
    leg_s: Option<u32>,
    dwell_s: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    traffic_factor: Option<f64>,
    speed_step: Option<f64>,
    max_speed: Option<f64>,
    lambda: Option<f64>,
    boarding_rate: Option<u32>,
    bus_capacity: Option<u32>,
    weights: Option<Weights>,
    desired_speed: Option<(f64, f64)>,
    fleet_size: Option<usize>,
    dispatch_headway_s: Option<u32>,
    capacity_mode: Option<CapacityMode>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDemand {
    arrival_period: Option<u32>,
    arrival_cmf: Option<Vec<f64>>,
    arrival_cmfs: Option<Vec<Vec<f64>>>,
    alight_cmf: Option<Vec<f64>>,
}

fn cmf(field: &str, values: Vec<f64>) -> Result<DiscreteCmf> {
    DiscreteCmf::new(values).map_err(|e| match e {
        Error::Validation { reason, .. } => Error::validation(field, reason),
        other => other,
    })
}

impl RawScenario {
    fn build(self) -> Result<Scenario> {
        let defaults = Scenario::default();

        let n = self.network;
        let network = LoopNetwork::new(
            n.stop_positions
                .unwrap_or_else(|| defaults.network.stop_positions().to_vec()),
            n.delta.unwrap_or(defaults.network.delta()),
            n.loop_length.unwrap_or(defaults.network.loop_length()),
        )?;

        let d = ScenarioParams::default();
        let p = self.params;
        let params = ScenarioParams {
            traffic_factor: p.traffic_factor.unwrap_or(d.traffic_factor),
            speed_step: p.speed_step.unwrap_or(d.speed_step),
            max_speed: p.max_speed.unwrap_or(d.max_speed),
            lambda: p.lambda.unwrap_or(d.lambda),
            boarding_rate: p.boarding_rate.unwrap_or(d.boarding_rate),
            bus_capacity: p.bus_capacity.unwrap_or(d.bus_capacity),
            weights: p.weights.unwrap_or(d.weights),
            desired_speed: p.desired_speed.unwrap_or(d.desired_speed),
            fleet_size: p.fleet_size.unwrap_or(d.fleet_size),
            dispatch_headway_s: p.dispatch_headway_s.unwrap_or(d.dispatch_headway_s),
            capacity_mode: p.capacity_mode.unwrap_or(d.capacity_mode),
        };
        params.validate()?;

        let t = self.timetable;
        let timetable = match (t.stops, t.leg_s, t.dwell_s) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(Error::validation(
                    "timetable",
                    "give either explicit `stops` or `leg_s`/`dwell_s`, not both",
                ))
            }
            (Some(stops), None, None) => {
                let ret = t.depot_return_s.ok_or_else(|| {
                    Error::validation("timetable.depot_return_s", "required with explicit stops")
                })?;
                Timetable::new(stops, ret)?
            }
            (None, leg, dwell) => {
                let tt = Timetable::uniform(
                    network.street_stops(),
                    leg.unwrap_or(120),
                    dwell.unwrap_or(30),
                )?;
                if let Some(ret) = t.depot_return_s {
                    Timetable::new(tt.entries().to_vec(), ret)?
                } else {
                    tt
                }
            }
        };

        let dm = self.demand;
        let arrival_cmfs = match (dm.arrival_cmf, dm.arrival_cmfs) {
            (Some(_), Some(_)) => {
                return Err(Error::validation(
                    "demand",
                    "give either `arrival_cmf` or `arrival_cmfs`, not both",
                ))
            }
            (Some(one), None) => vec![cmf("demand.arrival_cmf", one)?; network.queue_stops()],
            (None, Some(many)) => many
                .into_iter()
                .enumerate()
                .map(|(i, c)| cmf(&format!("demand.arrival_cmfs[{i}]"), c))
                .collect::<Result<_>>()?,
            (None, None) => vec![DiscreteCmf::default_arrivals(); network.queue_stops()],
        };
        let demand = DemandSchedule {
            arrival_period: dm.arrival_period.unwrap_or(60),
            arrival_cmfs,
            alight_cmf: match dm.alight_cmf {
                Some(c) => cmf("demand.alight_cmf", c)?,
                None => DiscreteCmf::default_alightings(),
            },
        };

        Scenario::new(network, timetable, params, demand)
    }
}
