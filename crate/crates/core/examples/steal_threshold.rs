//! Why a victim should refuse to split small amounts of work: with two
//! processors and a latency close to W, an unconditional split makes the run
//! slower than sequential execution.

use ws_latency::harness::{mean_of, replicate};
use ws_latency::workstealing::{run_simulation, SimConfig};

fn main() {
    let base = SimConfig::new(150, 2, 100);
    let off = run_simulation(base.clone().with_threshold(false)).unwrap().0;
    let on = run_simulation(base).unwrap().0;
    println!("W=150 p=2 lambda=100");
    println!(
        "  no threshold:       makespan {} ({} grants)",
        off.makespan, off.requests_granted
    );
    println!(
        "  threshold 2*lambda: makespan {} ({} grants)",
        on.makespan, on.requests_granted
    );

    println!();
    println!("mean makespan over 200 seeds, W=10000 p=8");
    println!("{:>7} {:>12} {:>12}", "lambda", "threshold", "none");
    for lambda in [2, 50, 500, 2000] {
        let cfg = SimConfig::new(10_000, 8, lambda);
        let with = replicate(&cfg, 0, 200).unwrap();
        let without = replicate(&cfg.clone().with_threshold(false), 0, 200).unwrap();
        println!(
            "{lambda:>7} {:>12.1} {:>12.1}",
            mean_of(&with, |r| r.makespan as f64),
            mean_of(&without, |r| r.makespan as f64)
        );
    }
}
