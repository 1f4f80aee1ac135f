//! Fits the constant of the latency term by least squares over a grid of
//! simulated configurations, per response policy.

use ws_latency::harness::{mean_of, replicate};
use ws_latency::model::{self, FitRow};
use ws_latency::workstealing::{ResponsePolicy, SimConfig};

fn main() {
    for (policy, threshold) in [
        (ResponsePolicy::Mwt, true),
        (ResponsePolicy::Mwt, false),
        (ResponsePolicy::Swt, true),
    ] {
        let mut rows = Vec::new();
        for w in [100_000u64, 1_000_000, 10_000_000] {
            for p in [32usize, 64, 128] {
                for lambda in [2u64, 8, 32, 128, 500] {
                    let cfg = SimConfig::new(w, p, lambda)
                        .with_policy(policy)
                        .with_threshold(threshold);
                    let runs = replicate(&cfg, 0, 30).unwrap();
                    rows.push(FitRow {
                        work: w as f64,
                        procs: p as f64,
                        latency: lambda as f64,
                        mean_makespan: mean_of(&runs, |r| r.makespan as f64),
                    });
                }
            }
        }
        let c = model::fit_cprime(&rows).unwrap();
        let onoff = if threshold { "on" } else { "off" };
        println!(
            "{policy} threshold {onoff}: c' = {c:.3} over {} configurations",
            rows.len()
        );
    }
}
