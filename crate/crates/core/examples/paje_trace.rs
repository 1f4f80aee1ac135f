//! Writes a Paje trace of one run for viewing in a Paje-compatible viewer.
//!
//! `cargo run --example paje_trace -- [path]`

use std::path::PathBuf;

use ws_latency::expio::export_paje;
use ws_latency::workstealing::{run_simulation, SimConfig};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("ws_latency.paje"));
    let cfg = SimConfig::new(20_000, 8, 50).with_seed(3);
    let (result, trace) = run_simulation(cfg.clone()).unwrap();
    export_paje(&trace, cfg.latency, &path).unwrap();
    println!(
        "{} records, makespan {}, {} steal requests -> {}",
        trace.records.len(),
        result.makespan,
        result.requests_total,
        path.display()
    );
}
