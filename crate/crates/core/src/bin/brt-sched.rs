//! Command-line front end.
//!
//! `BRT_SCHED_OUT` sets the default output directory and
//! `BRT_SCHED_THREADS` the batch worker count.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{error, info};

use brt_sched::sim::emit::{self, Format};
use brt_sched::sim::{EpisodeOptions, TimingMode};
use brt_sched::verify::{fuzz_episodes, oracle_equivalence, tiny_instance};
use brt_sched::{run_batch, run_episode_with, BatchConfig, Error, Policy, Scenario};

#[derive(Parser)]
#[command(name = "brt-sched", version, about = "Bus loop simulation with a look-ahead speed policy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Baseline,
    Dp,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and write its trace.
    Run {
        /// Scenario TOML file; the built-in default when omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dp")]
        policy: PolicyArg,
        /// Look-ahead depth in seconds for the dp policy.
        #[arg(long, default_value_t = 5)]
        la: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "BRT_SCHED_OUT", default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Write 0 for solver times so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Paired baseline and look-ahead episodes over many seeds.
    Batch {
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// A single depth or an inclusive range such as `4..9`.
        #[arg(long, default_value = "4..9", value_parser = parse_range)]
        la: RangeInclusive<u32>,
        #[arg(long, default_value_t = 20)]
        runs: u32,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long, env = "BRT_SCHED_OUT", default_value = "out")]
        out: PathBuf,
        #[arg(long, env = "BRT_SCHED_THREADS")]
        threads: Option<usize>,
    },
    /// Check the planner against the exhaustive oracle and fuzz the
    /// episode invariants.
    Verify {
        #[arg(long, default_value_t = 25)]
        instances: u64,
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let parse = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("`{v}`: {e}"));
    let range = match s.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.trim_start_matches('='))?,
        None => parse(s)?..=parse(s)?,
    };
    if range.is_empty() || *range.start() == 0 {
        return Err(format!("`{s}` is not a non-empty range of positive depths"));
    }
    Ok(range)
}

fn load(path: Option<&Path>) -> brt_sched::Result<Scenario> {
    match path {
        Some(p) => Scenario::load(p),
        None => Ok(Scenario::default()),
    }
}

fn run(cli: Cli) -> brt_sched::Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            policy,
            la,
            seed,
            out,
            format,
            no_timing,
        } => {
            let sc = load(scenario.as_deref())?;
            let policy = match policy {
                PolicyArg::Baseline => Policy::Baseline,
                PolicyArg::Dp => Policy::Dp { lookahead: la },
            };
            let options = EpisodeOptions {
                timing: if no_timing { TimingMode::Disabled } else { TimingMode::Measured },
                ..EpisodeOptions::default()
            };
            let result = run_episode_with(&sc, policy, seed, &options)?;
            let (format, ext) = match format {
                FormatArg::Csv => (Format::Csv, "csv"),
                FormatArg::Jsonl => (Format::JsonLines, "jsonl"),
            };
            let path = out.join(format!("trace_{policy}_seed{seed}.{ext}"));
            emit::write_trace(&result, sc.network.queue_stops(), format, &path)?;
            let areas: Vec<String> = result.per_stop_area.iter().map(|a| a.to_string()).collect();
            println!(
                "{policy} seed {seed}: {:?} at k = {}, waiting area [{}], total cost {:.3}",
                result.termination,
                result.final_k(),
                areas.join(", "),
                result.total_cost
            );
            println!("wrote {}", path.display());
        }
        Command::Batch {
            scenario,
            la,
            runs,
            base_seed,
            out,
            threads,
        } => {
            let sc = load(scenario.as_deref())?;
            let mut config = BatchConfig::new(la.collect(), runs, base_seed);
            config.threads = threads;
            let summary = run_batch(&sc, &config)?;
            let stops = sc.network.queue_stops();
            emit::write_runs_jsonl(&summary.records, &out.join("runs.jsonl"))?;
            emit::write_batch_csv(&summary, stops, &out.join("batch.csv"))?;
            emit::write_summary_json(&summary, &out.join("summary.json"))?;
            for s in &summary.lookaheads {
                let imp: Vec<String> = s.improvement_pct.iter().map(|v| format!("{v:.1}")).collect();
                println!(
                    "dp-{}: improvement % [{}], mean solve {:.1} us, mean nodes {:.1}",
                    s.lookahead,
                    imp.join(", "),
                    s.timing_mean_us,
                    s.mean_expanded_nodes
                );
            }
            println!("wrote {}", out.display());
        }
        Command::Verify {
            instances,
            episodes,
            seed,
        } => {
            let mut failed = 0;
            for i in 0..instances {
                let sc = tiny_instance(seed.wrapping_add(i));
                let eq = oracle_equivalence(&sc)?;
                if !eq.holds() {
                    failed += 1;
                    error!("instance {i}: oracle {} vs planner {}", eq.oracle_cost, eq.lookahead_cost);
                }
            }
            println!("oracle equivalence: {}/{} instances agree", instances - failed, instances);
            let report = fuzz_episodes(episodes, seed);
            for v in &report.violations {
                error!("{v}");
            }
            println!(
                "invariant fuzz: {} violations in {} episodes",
                report.violations.len(),
                report.episodes
            );
            if failed > 0 || !report.violations.is_empty() {
                return Err(Error::Invariant {
                    k: 0,
                    detail: "verification failed".into(),
                });
            }
            info!("verification passed");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
