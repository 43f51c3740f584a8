use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

use super::episode::run_episode_with;
use super::metrics::mean;
use super::{EpisodeOptions, EpisodeResult, Policy, Termination};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub la_values: Vec<u32>,
    pub runs: u32,
    /// Seeds are `base_seed, base_seed + 1, ...`.
    pub base_seed: u64,
    /// Worker threads; `None` uses rayon's default, `Some(1)` runs serially
    /// so solver timings are free of contention.
    pub threads: Option<usize>,
    pub options: EpisodeOptions,
}

impl BatchConfig {
    pub fn new(la_values: Vec<u32>, runs: u32, base_seed: u64) -> Self {
        Self {
            la_values,
            runs,
            base_seed,
            threads: None,
            options: EpisodeOptions::default(),
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..u64::from(self.runs)).map(|i| self.base_seed.wrapping_add(i)).collect()
    }
}

/// Per-run metrics, one per (policy, look-ahead, seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub policy: String,
    pub lookahead: Option<u32>,
    pub seed: u64,
    pub per_stop_area: Vec<f64>,
    pub total_cost: f64,
    pub final_k: u32,
    pub termination: Termination,
    pub mean_solve_us: f64,
    pub max_solve_us: u64,
    pub mean_expanded_nodes: f64,
    pub truncations: u32,
}

impl RunRecord {
    fn from_episode(e: &EpisodeResult) -> Self {
        Self {
            policy: e.policy.to_string(),
            lookahead: e.policy.lookahead(),
            seed: e.seed,
            per_stop_area: e.per_stop_area.clone(),
            total_cost: e.total_cost,
            final_k: e.final_k(),
            termination: e.termination,
            mean_solve_us: e.mean_solve_us(),
            max_solve_us: e.step_timings.iter().copied().max().unwrap_or(0),
            mean_expanded_nodes: e.mean_expanded_nodes(),
            truncations: e.truncations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AreaStats {
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl AreaStats {
    fn of(areas: &[&[f64]]) -> Self {
        let stops = areas.first().map_or(0, |a| a.len());
        let column = |m: usize| areas.iter().map(move |a| a[m]);
        Self {
            mean: (0..stops).map(|m| mean(column(m))).collect(),
            min: (0..stops).map(|m| column(m).fold(f64::INFINITY, f64::min)).collect(),
            max: (0..stops).map(|m| column(m).fold(f64::NEG_INFINITY, f64::max)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LookaheadStats {
    pub lookahead: u32,
    pub area: AreaStats,
    /// Mean over seeds of `100 (1 - dp / baseline)` per stop.
    pub improvement_pct: Vec<f64>,
    /// Fraction of seeds where the policy's area is at most the baseline's.
    pub seeds_not_worse: Vec<f64>,
    pub timing_mean_us: f64,
    pub timing_max_us: u64,
    pub mean_expanded_nodes: f64,
    pub mean_final_k: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BatchSummary {
    pub runs: u32,
    pub seeds: Vec<u64>,
    pub baseline: AreaStats,
    pub baseline_final_k: Vec<u32>,
    pub lookaheads: Vec<LookaheadStats>,
    pub records: Vec<RunRecord>,
}

/// Paired improvement of `policy` over `baseline` in percent; 0 where the
/// baseline area is 0.
pub fn improvement_pct(policy: f64, baseline: f64) -> f64 {
    if baseline > 0.0 {
        100.0 * (1.0 - policy / baseline)
    } else {
        0.0
    }
}

/// Runs one baseline episode and one episode per look-ahead for each seed.
/// Episodes sharing a seed see the same passenger demand.
pub fn run_batch(scenario: &Scenario, config: &BatchConfig) -> Result<BatchSummary> {
    scenario.validate()?;
    let seeds = config.seeds();
    let policies: Vec<Policy> = std::iter::once(Policy::Baseline)
        .chain(config.la_values.iter().map(|&lookahead| Policy::Dp { lookahead }))
        .collect();
    let jobs: Vec<(u64, Policy)> = seeds
        .iter()
        .flat_map(|&s| policies.iter().map(move |&p| (s, p)))
        .collect();
    info!("running {} episodes", jobs.len());

    let run = || {
        jobs.par_iter()
            .map(|&(seed, policy)| run_episode_with(scenario, policy, seed, &config.options))
            .collect::<Result<Vec<_>>>()
    };
    let episodes = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::validation("threads", e.to_string()))?
            .install(run)?,
        None => run()?,
    };

    let per_seed: Vec<&[EpisodeResult]> = episodes.chunks(policies.len()).collect();
    for (group, &seed) in per_seed.iter().zip(&seeds) {
        let base = &group[0];
        for other in &group[1..] {
            let common = base.final_k().min(other.final_k());
            if base.arrival_digest(common) != other.arrival_digest(common) {
                return Err(Error::Episode {
                    seed,
                    source: Box::new(Error::Invariant {
                        k: common,
                        detail: format!("{} and baseline saw different arrivals", other.policy),
                    }),
                });
            }
        }
    }

    let baselines: Vec<&EpisodeResult> = per_seed.iter().map(|g| &g[0]).collect();
    let lookaheads = config
        .la_values
        .iter()
        .enumerate()
        .map(|(i, &la)| {
            let dps: Vec<&EpisodeResult> = per_seed.iter().map(|g| &g[i + 1]).collect();
            let stops = scenario.network.queue_stops();
            let pairs = || baselines.iter().zip(&dps);
            LookaheadStats {
                lookahead: la,
                area: AreaStats::of(&dps.iter().map(|e| e.per_stop_area.as_slice()).collect::<Vec<_>>()),
                improvement_pct: (0..stops)
                    .map(|m| mean(pairs().map(|(b, d)| improvement_pct(d.per_stop_area[m], b.per_stop_area[m]))))
                    .collect(),
                seeds_not_worse: (0..stops)
                    .map(|m| mean(pairs().map(|(b, d)| f64::from(u8::from(d.per_stop_area[m] <= b.per_stop_area[m])))))
                    .collect(),
                timing_mean_us: mean(dps.iter().flat_map(|e| e.step_timings.iter().map(|&t| t as f64))),
                timing_max_us: dps.iter().flat_map(|e| e.step_timings.iter().copied()).max().unwrap_or(0),
                mean_expanded_nodes: mean(dps.iter().flat_map(|e| e.expanded_nodes.iter().map(|&n| n as f64))),
                mean_final_k: mean(dps.iter().map(|e| f64::from(e.final_k()))),
            }
        })
        .collect();

    Ok(BatchSummary {
        runs: config.runs,
        seeds,
        baseline: AreaStats::of(&baselines.iter().map(|e| e.per_stop_area.as_slice()).collect::<Vec<_>>()),
        baseline_final_k: baselines.iter().map(|e| e.final_k()).collect(),
        lookaheads,
        records: episodes.iter().map(RunRecord::from_episode).collect(),
    })
}
