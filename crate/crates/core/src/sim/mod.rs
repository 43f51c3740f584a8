//! Episode runner, paired Monte-Carlo batches, waiting-time metrics and
//! result files.

mod batch;
pub mod emit;
mod episode;
mod invariants;
mod metrics;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::demand::ExpectationMode;
use crate::feasibility::Regime;
use crate::solver::TieBreak;

pub use batch::{run_batch, BatchConfig, BatchSummary, LookaheadStats, RunRecord};
pub use episode::{run_episode, run_episode_with};
pub use invariants::check_step;
pub use metrics::{mean, queue_area, waiting_area};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "policy")]
pub enum Policy {
    /// Follow the timetable's desired position.
    Baseline,
    /// Rolling look-ahead dynamic program.
    Dp { lookahead: u32 },
}

impl Policy {
    pub fn lookahead(self) -> Option<u32> {
        match self {
            Policy::Baseline => None,
            Policy::Dp { lookahead } => Some(lookahead),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Baseline => f.write_str("baseline"),
            Policy::Dp { lookahead } => write!(f, "dp-{lookahead}"),
        }
    }
}

impl FromStr for Policy {
    type Err = String;

    /// `baseline`, or `dp-<lookahead>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "baseline" {
            return Ok(Policy::Baseline);
        }
        s.strip_prefix("dp-")
            .and_then(|la| la.parse().ok())
            .filter(|&la: &u32| la >= 1)
            .map(|lookahead| Policy::Dp { lookahead })
            .ok_or_else(|| format!("unknown policy `{s}` (expected `baseline` or `dp-<steps>`)"))
    }
}

/// Whether solver wall-clock times are recorded. With `Disabled` every
/// `solve_us` is 0 so traces are byte-for-byte reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimingMode {
    #[default]
    Measured,
    Disabled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOptions {
    pub timing: TimingMode,
    pub tie_break: TieBreak,
    pub expectation: ExpectationMode,
    /// Run the per-step invariant checks.
    pub check_invariants: bool,
}

impl Default for EpisodeOptions {
    fn default() -> Self {
        Self {
            timing: TimingMode::Measured,
            tie_break: TieBreak::LowerSpeed,
            expectation: ExpectationMode::ClosedForm,
            check_invariants: true,
        }
    }
}

/// One row of an episode trace: the state at time `k`, its stage cost, the
/// regime that constrained the next control and the time spent choosing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: u32,
    pub position_m: f64,
    pub speed: f64,
    pub recent_stop: usize,
    pub capacity_free: u32,
    pub queues: Vec<u32>,
    pub stage_cost: f64,
    pub regime: Regime,
    pub solve_us: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The bus reached the depot-return window.
    Returned,
    /// The clock reached the horizon first.
    HorizonExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeResult {
    pub policy: Policy,
    pub seed: u64,
    pub trace: Vec<TraceRow>,
    /// Passenger-seconds waited at each queue stop.
    pub per_stop_area: Vec<f64>,
    pub total_cost: f64,
    /// Solver microseconds per decision step.
    pub step_timings: Vec<u64>,
    /// Nodes expanded per decision step; empty for the baseline.
    pub expanded_nodes: Vec<u64>,
    pub termination: Termination,
    /// Stop visits where the alighting draw exceeded the passengers on board.
    pub truncations: u32,
    /// Realized arrival events `(k, per-stop counts)`.
    pub arrival_log: Vec<(u32, Vec<u32>)>,
}

impl EpisodeResult {
    pub fn final_k(&self) -> u32 {
        self.trace.last().map_or(0, |r| r.k)
    }

    pub fn mean_solve_us(&self) -> f64 {
        mean(self.step_timings.iter().map(|&t| t as f64))
    }

    pub fn mean_expanded_nodes(&self) -> f64 {
        mean(self.expanded_nodes.iter().map(|&n| n as f64))
    }

    /// Digest of the arrival events up to and including step `through_k`.
    /// Two episodes with the same seed agree on every common prefix.
    pub fn arrival_digest(&self, through_k: u32) -> u64 {
        use std::hash::{DefaultHasher, Hash, Hasher};
        let mut h = DefaultHasher::new();
        for (k, counts) in self.arrival_log.iter().take_while(|(k, _)| *k <= through_k) {
            k.hash(&mut h);
            counts.hash(&mut h);
        }
        h.finish()
    }
}
