//! Parallel execution of many independent runs.
//!
//! Runs share nothing; results are sorted by configuration key and seed so
//! output never depends on thread interleaving.

use rayon::prelude::*;

use crate::engine::Time;
use crate::error::ConfigError;
use crate::expio::SweepSpec;
use crate::metrics::SimResult;
use crate::workstealing::{run_simulation, ResponsePolicy, SimConfig};

fn sort_key(r: &SimResult) -> (Time, usize, Time, ResponsePolicy, bool, u64) {
    let c = &r.config;
    (
        c.total_work,
        c.num_procs,
        c.latency,
        c.policy,
        c.threshold_enabled,
        r.seed,
    )
}

/// Runs every configuration in parallel.
pub fn run_many(configs: Vec<SimConfig>) -> Result<Vec<SimResult>, ConfigError> {
    let mut results = configs
        .into_par_iter()
        .map(|cfg| run_simulation(cfg).map(|(result, _)| result))
        .collect::<Result<Vec<_>, _>>()?;
    results.sort_by_key(sort_key);
    Ok(results)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SimResult>, ConfigError> {
    run_many(spec.runs())
}

/// `replications` runs of `config` with seeds `base_seed, base_seed + 1, ...`.
pub fn replicate(config: &SimConfig, base_seed: u64, replications: u64) -> Result<Vec<SimResult>, ConfigError> {
    run_many(
        (0..replications)
            .map(|r| config.clone().with_seed(base_seed + r))
            .collect(),
    )
}

pub fn mean_of(results: &[SimResult], f: impl Fn(&SimResult) -> f64) -> f64 {
    results.iter().map(f).sum::<f64>() / results.len() as f64
}

/// Settings of the empirical limit-latency search.
#[derive(Debug, Clone)]
pub struct LimitSearch {
    pub replications: u64,
    pub base_seed: u64,
    pub accept_factor: f64,
    pub policy: ResponsePolicy,
    pub threshold: bool,
    /// Work and latency are both multiplied by this factor and the result is
    /// divided by it, giving sub-unit resolution on the latency. Only the
    /// ratio between `W/p` and the latency matters to the outcome.
    pub time_scale: u64,
}

impl Default for LimitSearch {
    fn default() -> Self {
        Self {
            replications: 100,
            base_seed: 0,
            accept_factor: crate::model::DEFAULT_ACCEPT_FACTOR,
            policy: ResponsePolicy::Mwt,
            threshold: true,
            time_scale: 1,
        }
    }
}

/// Largest latency whose mean makespan stays within `accept_factor * W/p`:
/// doubling from 1 until a latency fails, then integer bisection between the
/// last success and the first failure. `None` if even latency 1 fails.
pub fn empirical_limit_latency(work: Time, procs: usize, search: &LimitSearch) -> Result<Option<f64>, ConfigError> {
    let scale = search.time_scale.max(1);
    let scaled_work = work * scale;
    let budget = search.accept_factor * scaled_work as f64 / procs as f64;
    let acceptable = |latency: Time| -> Result<bool, ConfigError> {
        let cfg = SimConfig::new(scaled_work, procs, latency)
            .with_policy(search.policy)
            .with_threshold(search.threshold);
        let runs = replicate(&cfg, search.base_seed, search.replications)?;
        Ok(mean_of(&runs, |r| r.makespan as f64) <= budget)
    };

    if !acceptable(1)? {
        return Ok(None);
    }
    let cap = scaled_work / 2;
    let mut good = 1;
    let mut bad = None;
    while good < cap {
        let next = (good * 2).min(cap);
        if acceptable(next)? {
            good = next;
        } else {
            bad = Some(next);
            break;
        }
    }
    if let Some(mut bad) = bad {
        while bad - good > 1 {
            let mid = good + (bad - good) / 2;
            if acceptable(mid)? {
                good = mid;
            } else {
                bad = mid;
            }
        }
    }
    Ok(Some(good as f64 / scale as f64))
}
