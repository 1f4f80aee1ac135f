//! Three processors, W=100, lambda=5, with a fixed sequence of steal targets.
//! Prints the work each processor holds at a few instants, then the full
//! state timeline.

use ws_latency::workstealing::{ScriptedSteal, SimConfig, Simulation};

fn main() {
    let cfg = SimConfig::new(100, 3, 5).with_threshold(false).with_victim_script(vec![
        ScriptedSteal { thief: 1, victim: 0 },
        ScriptedSteal { thief: 2, victim: 1 },
        ScriptedSteal { thief: 2, victim: 0 },
    ]);
    let mut sim = Simulation::new(cfg).expect("valid config");
    for t in [0, 5, 10, 15, 20] {
        sim.run_until(t);
        println!(
            "t={t:>3}  remaining {:?}  in flight {}",
            sim.remaining_work(),
            sim.in_flight_work()
        );
    }
    let (result, trace) = sim.run();
    println!();
    for (t, proc, state) in trace.state_changes() {
        println!("t={t:>3}  P{proc} -> {state:?}");
    }
    println!();
    println!(
        "makespan {}  startup ends {}  shutdown starts {}  requests {} ({} granted)",
        result.makespan, result.startup_end, result.shutdown_start, result.requests_total, result.requests_granted
    );
}
