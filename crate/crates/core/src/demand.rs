//! Seeded passenger demand: arrivals at every stop on a fixed cadence and
//! alighting requests per stop visit.
//!
//! Every uniform draw comes from ChaCha8 keyed by `(seed, stream, stop, k)`
//! with an explicit stream id and word position, so a draw never depends on
//! how many other draws were made before it. Two policies run with the same
//! seed therefore see the same realized demand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{BusState, Disturbance};
use crate::error::{Error, Result};
use crate::network::LoopNetwork;

/// Cumulative mass function over the support `{1, ..., V}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiscreteCmf {
    cmf: Vec<f64>,
}

impl TryFrom<Vec<f64>> for DiscreteCmf {
    type Error = Error;

    fn try_from(cmf: Vec<f64>) -> Result<Self> {
        DiscreteCmf::new(cmf)
    }
}

impl From<DiscreteCmf> for Vec<f64> {
    fn from(c: DiscreteCmf) -> Self {
        c.cmf
    }
}

impl DiscreteCmf {
    pub fn new(cmf: Vec<f64>) -> Result<Self> {
        if cmf.is_empty() {
            return Err(Error::validation("cmf", "must have at least one support point"));
        }
        let mut prev = 0.0;
        for &c in &cmf {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::validation("cmf", format!("value {c} outside [0, 1]")));
            }
            if c < prev {
                return Err(Error::validation("cmf", "values must be non-decreasing"));
            }
            prev = c;
        }
        if *cmf.last().expect("non-empty") != 1.0 {
            return Err(Error::validation("cmf", "final value must be exactly 1.0"));
        }
        Ok(Self { cmf })
    }

    /// Fitted arrival distribution over `{1, ..., 5}` passengers.
    pub fn default_arrivals() -> Self {
        Self::new(vec![0.14, 0.81, 0.97, 0.99, 1.0]).expect("valid")
    }

    /// Fitted alighting distribution over `{1, ..., 5}` passengers.
    pub fn default_alightings() -> Self {
        Self::new(vec![0.51, 0.77, 0.88, 0.95, 1.0]).expect("valid")
    }

    pub fn values(&self) -> &[f64] {
        &self.cmf
    }

    pub fn support_len(&self) -> usize {
        self.cmf.len()
    }

    pub fn pmf(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cmf
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.pmf()
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }

    /// `E[min(X, cap)]`.
    pub fn truncated_mean(&self, cap: f64) -> f64 {
        self.pmf()
            .iter()
            .enumerate()
            .map(|(i, p)| ((i + 1) as f64).min(cap) * p)
            .sum()
    }
}

/// Inverse-CMF sampling: the smallest support value `v` with `r < cmf(v)`.
pub fn sample_cmf(cmf: &DiscreteCmf, r: f64) -> u32 {
    debug_assert!((0.0..1.0).contains(&r));
    let idx = cmf
        .cmf
        .iter()
        .position(|&c| r < c)
        .unwrap_or(cmf.cmf.len() - 1);
    idx as u32 + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandSchedule {
    /// Seconds between arrival events; the first event is one period after
    /// the trip starts.
    pub arrival_period: u32,
    /// One arrival distribution per queue stop.
    pub arrival_cmfs: Vec<DiscreteCmf>,
    pub alight_cmf: DiscreteCmf,
}

impl DemandSchedule {
    pub fn uniform(queue_stops: usize, arrival_period: u32, arrival: DiscreteCmf, alight: DiscreteCmf) -> Self {
        Self {
            arrival_period,
            arrival_cmfs: vec![arrival; queue_stops],
            alight_cmf: alight,
        }
    }

    /// Arrivals every 60 s with the fitted distributions.
    pub fn default_for(network: &LoopNetwork) -> Self {
        Self::uniform(
            network.queue_stops(),
            60,
            DiscreteCmf::default_arrivals(),
            DiscreteCmf::default_alightings(),
        )
    }

    pub fn validate(&self, network: &LoopNetwork) -> Result<()> {
        if self.arrival_period < 1 {
            return Err(Error::validation("demand.arrival_period", "must be at least 1 s"));
        }
        if self.arrival_cmfs.len() != network.queue_stops() {
            return Err(Error::validation(
                "demand.arrival_cmfs",
                format!(
                    "expected {} distributions, one per queue stop, found {}",
                    network.queue_stops(),
                    self.arrival_cmfs.len()
                ),
            ));
        }
        Ok(())
    }

    /// Whether step `k` carries an arrival event.
    pub fn is_arrival_step(&self, k: u32) -> bool {
        k > 0 && k.is_multiple_of(self.arrival_period)
    }
}

/// Per-stop expected arrivals at step `k`: the CMF mean on cadence steps and
/// zero otherwise.
pub fn expected_arrivals(schedule: &DemandSchedule, k: u32) -> Vec<f64> {
    if schedule.is_arrival_step(k) {
        schedule.arrival_cmfs.iter().map(DiscreteCmf::mean).collect()
    } else {
        vec![0.0; schedule.arrival_cmfs.len()]
    }
}

const ARRIVAL_STREAM: u64 = 1;
const ALIGHT_STREAM: u64 = 2;
const SOLVER_STREAM: u64 = 3;

/// Counter-based uniform source keyed by seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandStream {
    pub seed: u64,
}

impl DemandStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Uniform draw in `[0, 1)` for `(tag, stop, k, index)`.
    fn uniform(&self, tag: u64, stop: usize, k: u32, index: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((tag << 56) | ((stop as u64 & 0xff_ffff) << 32) | u64::from(k));
        rng.set_word_pos(u128::from(index) * 2);
        rng.gen::<f64>()
    }

    pub fn arrival_uniform(&self, stop: usize, k: u32) -> f64 {
        self.uniform(ARRIVAL_STREAM, stop, k, 0)
    }

    /// One alighting draw per stop visit.
    pub fn alight_uniform(&self, stop: usize) -> f64 {
        self.uniform(ALIGHT_STREAM, stop, 0, 0)
    }

    pub(crate) fn solver_uniform(&self, stop: usize, k: u32, index: u64) -> f64 {
        self.uniform(SOLVER_STREAM, stop, k, index)
    }

    /// Realized arrivals at every queue stop for step `k`.
    pub fn arrivals(&self, schedule: &DemandSchedule, k: u32) -> Vec<u32> {
        if !schedule.is_arrival_step(k) {
            return vec![0; schedule.arrival_cmfs.len()];
        }
        schedule
            .arrival_cmfs
            .iter()
            .enumerate()
            .map(|(j, cmf)| sample_cmf(cmf, self.arrival_uniform(j + 1, k)))
            .collect()
    }

    /// Raw alighting demand for route stop `stop`, before truncation.
    pub fn raw_alight(&self, schedule: &DemandSchedule, stop: usize) -> u32 {
        sample_cmf(&schedule.alight_cmf, self.alight_uniform(stop))
    }
}

/// A disturbance together with the untruncated alighting draw, so callers
/// can count truncation events.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDisturbance {
    pub disturbance: Disturbance<u32>,
    pub raw_alight: u32,
}

/// Realized disturbance for step `k`. Arrivals fire on the cadence; the
/// alighting demand refers to the bus's upcoming stop and is truncated to
/// the passengers on board.
pub fn disturbance_at(
    k: u32,
    state: &BusState<u32>,
    schedule: &DemandSchedule,
    network: &LoopNetwork,
    stream: &DemandStream,
) -> SampledDisturbance {
    let arrivals = stream.arrivals(schedule, k);
    let upcoming = state.recent_stop + 1;
    let raw_alight = if upcoming <= network.depot_return() && state.onboard > 0 {
        stream.raw_alight(schedule, upcoming)
    } else {
        0
    };
    SampledDisturbance {
        disturbance: Disturbance {
            arrivals,
            alight: raw_alight.min(state.onboard),
        },
        raw_alight,
    }
}

/// How the planner replaces random arrivals with a deterministic value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExpectationMode {
    /// Exact mean from the CMF.
    ClosedForm,
    /// Average of `samples` keyed draws; for validating the closed form.
    Sampled { samples: u32, seed: u64 },
}

/// Disturbance used inside the planner's model of step `k`.
pub fn expected_disturbance(
    k: u32,
    state: &BusState<f64>,
    schedule: &DemandSchedule,
    mode: ExpectationMode,
) -> Disturbance<f64> {
    let arrivals = match mode {
        ExpectationMode::ClosedForm => expected_arrivals(schedule, k),
        ExpectationMode::Sampled { samples, seed } => sampled_arrivals(schedule, k, samples, seed),
    };
    let alight = if state.onboard > 0.0 {
        schedule.alight_cmf.truncated_mean(state.onboard)
    } else {
        0.0
    };
    Disturbance { arrivals, alight }
}

/// Mean of `samples` keyed arrival draws per stop at step `k`.
pub fn sampled_arrivals(schedule: &DemandSchedule, k: u32, samples: u32, seed: u64) -> Vec<f64> {
    if !schedule.is_arrival_step(k) || samples == 0 {
        return vec![0.0; schedule.arrival_cmfs.len()];
    }
    let stream = DemandStream::new(seed);
    schedule
        .arrival_cmfs
        .iter()
        .enumerate()
        .map(|(j, cmf)| {
            let total: u64 = (0..u64::from(samples))
                .map(|i| u64::from(sample_cmf(cmf, stream.solver_uniform(j + 1, k, i))))
                .sum();
            total as f64 / f64::from(samples)
        })
        .collect()
}
