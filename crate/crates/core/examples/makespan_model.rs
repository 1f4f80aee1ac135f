//! Compares simulated makespans with the latency-aware prediction
//! W/p + 2*lambda*c'*log2(W/(2*lambda)) and with the latency-free bound.

use ws_latency::harness::replicate;
use ws_latency::metrics::summarize;
use ws_latency::model::{self, DEFAULT_C_PRIME};
use ws_latency::workstealing::SimConfig;

fn main() {
    println!(
        "{:>9} {:>4} {:>7} {:>11} {:>11} {:>8} {:>8}",
        "W", "p", "lambda", "simulated", "predicted", "ratio", "W/p"
    );
    for (w, p) in [(1_000_000u64, 32usize), (1_000_000, 64), (10_000_000, 64)] {
        for lambda in [8u64, 64, 262, 1000] {
            let runs = replicate(&SimConfig::new(w, p, lambda), 0, 100).unwrap();
            let makespans: Vec<f64> = runs.iter().map(|r| r.makespan as f64).collect();
            let stats = summarize(&makespans).unwrap();
            let (wf, pf, lf) = (w as f64, p as f64, lambda as f64);
            let predicted = model::predict_makespan(wf, pf, lf, DEFAULT_C_PRIME).unwrap();
            println!(
                "{w:>9} {p:>4} {lambda:>7} {:>11.0} {predicted:>11.0} {:>8.3} {:>8.0}",
                stats.mean,
                stats.mean / predicted,
                wf / pf
            );
        }
    }
}
