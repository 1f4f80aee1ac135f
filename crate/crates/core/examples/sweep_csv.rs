//! Runs a sweep document and writes the per-run and summary CSVs.
//!
//! `cargo run --release --example sweep_csv -- [out_dir]`

use std::path::PathBuf;

use ws_latency::expio::{aggregate, parse_sweep, result_rows, write_aggregate, write_results};
use ws_latency::harness::run_sweep;
use ws_latency::model::DEFAULT_C_PRIME;

const SWEEP: &str = "\
# total work as a geometric range, processors as a list
W = 1e5:1e7:10
p = 16, 64
lambda = 8, 128
policy = swt, mwt
threshold = on
replications = 20
base_seed = 1
";

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let spec = parse_sweep(SWEEP).expect("valid sweep");
    let results = run_sweep(&spec).unwrap();
    let runs = dir.join("sweep_runs.csv");
    let summary = dir.join("sweep_summary.csv");
    write_results(&results, &runs).unwrap();
    let rows = aggregate(&result_rows(&results), DEFAULT_C_PRIME);
    write_aggregate(&rows, &summary).unwrap();
    println!("{} runs -> {}", results.len(), runs.display());
    println!("summary -> {}", summary.display());
    for r in rows.iter().filter(|r| r.metric == "makespan") {
        println!(
            "W={:<9} p={:<3} lambda={:<4} {:<3} mean {:>10.1}  sd {:>7.1}  median {:>8}",
            r.work, r.p, r.lambda, r.policy, r.mean, r.stddev, r.median
        );
    }
}
