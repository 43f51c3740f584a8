//! Single-loop bus scheduling with stochastic passenger demand.
//!
//! The crate models one bus looping from a depot through a few street stops
//! and back, one second per step. Passengers arrive at stops and request
//! stops at random; a rolling look-ahead dynamic program picks the bus speed
//! each second to keep queues short while respecting the timetable.
//!
//! ```
//! use brt_sched::{run_episode, Policy, Scenario};
//!
//! let scenario = Scenario::default();
//! let result = run_episode(&scenario, Policy::Baseline, 7).unwrap();
//! assert!(result.final_k() <= scenario.horizon());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cost;
pub mod demand;
pub mod dynamics;
pub mod error;
pub mod feasibility;
pub mod network;
pub mod params;
pub mod scenario;
pub mod sim;
pub mod solver;
pub mod verify;

pub use cost::{bus_stage_cost, expected_stage_cost, stage_cost, CostBreakdown};
pub use demand::{DemandSchedule, DemandStream, DiscreteCmf, ExpectationMode};
pub use dynamics::{transition, BusState, Disturbance};
pub use error::{Error, Result};
pub use feasibility::{feasible_controls, ControlSet, Regime};
pub use network::{LoopNetwork, Timetable, TimetableEntry};
pub use params::{CapacityMode, ScenarioParams, Weights};
pub use scenario::Scenario;
pub use sim::{run_batch, run_episode, run_episode_with, BatchConfig, BatchSummary, EpisodeResult, Policy, Termination};
pub use solver::{baseline_policy, dp_lookahead, exhaustive_oracle, PolicyDecision, SolverConfig, TieBreak};
