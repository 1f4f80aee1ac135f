//! Mean number of steal requests as the latency grows, next to the count the
//! latency-free analysis expects.

use ws_latency::harness::{mean_of, replicate};
use ws_latency::model::{expected_steals_classic, DEFAULT_C_PRIME};
use ws_latency::workstealing::SimConfig;

fn main() {
    let (w, p) = (1_000_000u64, 64usize);
    let classic = expected_steals_classic(w as f64, p as f64, DEFAULT_C_PRIME).unwrap();
    println!("W={w} p={p}; latency-free expectation {classic:.0} requests");
    println!("{:>7} {:>10} {:>10} {:>10}", "lambda", "requests", "granted", "failed");
    for lambda in [1u64, 2, 8, 32, 128, 500, 2000] {
        let runs = replicate(&SimConfig::new(w, p, lambda), 0, 200).unwrap();
        println!(
            "{lambda:>7} {:>10.0} {:>10.0} {:>10.0}",
            mean_of(&runs, |r| r.requests_total as f64),
            mean_of(&runs, |r| r.requests_granted as f64),
            mean_of(&runs, |r| r.requests_failed as f64)
        );
    }
}
