use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while building a scenario, stepping the bus model, or
/// running the solver and harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A scenario field violates one of its invariants.
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("time {k} s is outside the timetable range [0, {horizon}] s")]
    OutOfRange { k: u32, horizon: u32 },

    #[error("stop index {index} does not exist (network has {stops} stops)")]
    InvalidStop { index: usize, stops: usize },

    /// Alighting demand exceeds the passengers on board.
    #[error("infeasible disturbance: {alight} passengers alighting with only {onboard} on board")]
    InfeasibleDisturbance { alight: f64, onboard: f64 },

    #[error("speed {speed} is not in the feasible set {allowed:?} ({regime})")]
    InfeasibleControl {
        speed: f64,
        allowed: Vec<f64>,
        regime: &'static str,
    },

    #[error("empty feasible control set at k = {k}")]
    EmptyControlSet { k: u32 },

    #[error("available capacity {value} outside [0, {max}]")]
    CapacityOutOfRange { value: f64, max: u32 },

    #[error("boarding {boarded} passengers exceeds queue {queue} at stop {stop}")]
    BoardingExceedsQueue { boarded: f64, queue: f64, stop: usize },

    #[error("fleet size mismatch: {got} bus states for a fleet of {expected}")]
    FleetMismatch { got: usize, expected: usize },

    #[error("oracle node budget of {budget} states exceeded")]
    OracleTooLarge { budget: usize },

    /// An invariant check failed while an episode was running.
    #[error("invariant violated at k = {k}: {detail}")]
    Invariant { k: u32, detail: String },

    #[error("episode with seed {seed} failed: {source}")]
    Episode {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end:
    /// 1 validation, 2 episode invariant violation, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. }
            | Error::OutOfRange { .. }
            | Error::InvalidStop { .. }
            | Error::FleetMismatch { .. }
            | Error::Parse { .. } => 1,
            Error::Io { .. } => 3,
            Error::Episode { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
