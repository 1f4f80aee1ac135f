//! Largest latency that keeps the makespan within 10% of W/p, from the model
//! and from simulation, and the processor count implied by W/p = 470*lambda.

use ws_latency::harness::{empirical_limit_latency, LimitSearch};
use ws_latency::model::{self, DEFAULT_ACCEPT_FACTOR, DEFAULT_C_PRIME, DEFAULT_RULE_SLOPE};

fn main() {
    println!(
        "{:>9} {:>4} {:>10} {:>10} {:>9}",
        "W", "p", "model", "simulated", "W/p/root"
    );
    for w in [1_000_000u64, 10_000_000] {
        for p in [32usize, 64, 128] {
            let root = model::limit_latency(w as f64, p as f64, DEFAULT_C_PRIME, DEFAULT_ACCEPT_FACTOR).unwrap();
            let search = LimitSearch {
                replications: 50,
                time_scale: (32.0 / root).ceil().max(1.0) as u64,
                ..Default::default()
            };
            let empirical = empirical_limit_latency(w, p, &search).unwrap();
            println!(
                "{w:>9} {p:>4} {root:>10.2} {:>10} {:>9.0}",
                empirical.map_or("-".to_string(), |e| format!("{e:.2}")),
                w as f64 / p as f64 / root
            );
        }
    }
    println!();
    for (w, lambda) in [(100_000_000u64, 500u64), (10_000_000, 250), (1_000_000, 10)] {
        println!(
            "W={w} lambda={lambda}: at most {} processors",
            model::max_processors(w, lambda, DEFAULT_RULE_SLOPE)
        );
    }
}
